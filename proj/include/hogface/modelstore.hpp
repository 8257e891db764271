#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hogface/pipeline.hpp"

namespace hogface {

// Model file layout (".2dhg"), all integers little-endian, reals IEEE-754 f64 LE:
//   "2DHG" | u32 version=1
//   u32 rows | u32 cols | u32 flags (bit0 dwt, bit1 raw 2DPCA) | u32 cell | u32 block | u32 B | u32 d | f64 eps
//   per layer: matrix basis (W x d) | u32 d | f64 eigenvalues[d]
//   u32 entry count
//   per entry: str label | str source_id | per layer: matrix features (H x d)
//   u64 byte sum of everything above
// Matrices are u32 rows, u32 cols, then row-major values; strings are u32 length + UTF-8.

inline constexpr std::uint32_t kModelVersion = 1;
inline constexpr char kModelExtension[] = ".2dhg";

class ModelLoadError : public std::runtime_error {
public:
    enum class Kind { truncated, bad_magic, bad_version, bad_checksum, bad_dims };

    ModelLoadError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

std::vector<std::uint8_t> serialize_model(const Model& model);

/// Validates checksum, magic, version and all dimensions before returning.
Model deserialize_model(std::span<const std::uint8_t> bytes);

/// Returns the number of bytes written. Throws IoError on a failed sink.
std::size_t save_model(const Model& model, std::ostream& sink);
Model load_model(std::istream& source);

/// Atomic write via a temporary file and rename.
std::size_t save_model_file(const Model& model, const std::filesystem::path& path);
Model load_model_file(const std::filesystem::path& path);

/// Hex rendering of the stored checksum; identifies a model build.
std::string model_version_tag(std::span<const std::uint8_t> model_bytes);

}  // namespace hogface
