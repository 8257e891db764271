#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hogface/matrix.hpp"

namespace hogface {

/// Little-endian encoder shared by the model file and the portal record log.
class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v);
    void raw(std::span<const std::uint8_t> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }
    void str(std::string_view s);       ///< u32 length prefix, then bytes
    void matrix(const Matrix& m);       ///< u32 rows, u32 cols, row-major f64
    void doubles(std::span<const double> v);  ///< u32 count, then f64 each

    std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }
    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

/// Thrown by ByteReader when a read would run past the end.
class TruncatedInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64();
    std::string str(std::size_t max_len = 1u << 20);
    /// Rejects matrices with more than max_elems entries before allocating.
    Matrix matrix(std::size_t max_elems = 1u << 24);
    std::vector<double> doubles(std::size_t max_count = 1u << 24);

    void skip(std::size_t n) {
        need(n, "skipped span");
        pos_ += n;
    }

    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    void need(std::size_t n, const char* what) const;

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

/// Sum of all bytes modulo 2^64.
std::uint64_t byte_sum(std::span<const std::uint8_t> bytes);

/// Writes to a sibling temporary file, fsyncs, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace hogface
