#include "hogface/binary_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <numeric>

#include "hogface/errors.hpp"

namespace hogface {

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void ByteWriter::matrix(const Matrix& m) {
    u32(static_cast<std::uint32_t>(m.rows()));
    u32(static_cast<std::uint32_t>(m.cols()));
    for (double v : m.data()) f64(v);
}

void ByteWriter::doubles(std::span<const double> v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (double x : v) f64(x);
}

void ByteReader::need(std::size_t n, const char* what) const {
    if (remaining() < n) {
        throw TruncatedInput(std::string("input ends inside ") + what + " at byte " + std::to_string(pos_));
    }
}

std::uint8_t ByteReader::u8() {
    need(1, "u8");
    return bytes_[pos_++];
}

std::uint32_t ByteReader::u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8, "u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str(std::size_t max_len) {
    const auto len = u32();
    if (len > max_len) throw ArgumentError("string length " + std::to_string(len) + " exceeds limit");
    need(len, "string");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
}

Matrix ByteReader::matrix(std::size_t max_elems) {
    const std::size_t rows = u32();
    const std::size_t cols = u32();
    if (rows != 0 && cols > max_elems / rows) {
        throw ArgumentError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " exceeds limit");
    }
    need(rows * cols * 8, "matrix payload");
    std::vector<double> data(rows * cols);
    for (auto& v : data) v = f64();
    return Matrix(rows, cols, std::move(data));
}

std::vector<double> ByteReader::doubles(std::size_t max_count) {
    const std::size_t n = u32();
    if (n > max_count) throw ArgumentError("vector length " + std::to_string(n) + " exceeds limit");
    need(n * 8, "vector payload");
    std::vector<double> out(n);
    for (auto& v : out) v = f64();
    return out;
}

std::uint64_t byte_sum(std::span<const std::uint8_t> bytes) {
    return std::accumulate(bytes.begin(), bytes.end(), std::uint64_t{0},
                           [](std::uint64_t acc, std::uint8_t b) { return acc + b; });
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid());
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw IoError("cannot create " + tmp.string() + ": " + std::strerror(errno));
    std::size_t done = 0;
    while (done < bytes.size()) {
        const auto n = ::write(fd, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            ::close(fd);
            ::unlink(tmp.c_str());
            throw IoError("write failed for " + tmp.string() + ": " + std::strerror(err));
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        ::unlink(tmp.c_str());
        throw IoError("cannot flush " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        ::unlink(tmp.c_str());
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

}  // namespace hogface
