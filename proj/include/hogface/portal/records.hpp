#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hogface/matrix.hpp"

namespace hogface::portal {

enum class Status { missing, found };

std::optional<Status> parse_status(std::string_view text);
std::string_view status_name(Status status);

struct PersonRecord {
    std::string id;
    std::string name;
    Status status = Status::missing;
    std::string contact;
    std::int64_t enrolled_at = 0;  ///< UTC seconds
    std::vector<std::string> photo_refs;

    friend bool operator==(const PersonRecord&, const PersonRecord&) = default;
};

/// A persisted enrollment: the record plus its projected features.
struct StoredPerson {
    PersonRecord record;
    std::vector<Matrix> features;
};

/// Thrown when durable storage cannot be updated; nothing is left half-written.
class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// records.log layout: "2DHR" | u32 version | str model tag, then per record
//   u32 payload length | payload | u64 byte sum of payload
// payload: str id | str name | u8 status | str contact | i64 enrolled_at |
//          u32 ref count + str refs | u32 feature count + matrices
// Encoding (little-endian, length-prefixed strings, u32 rows/cols matrices) matches the model file.

/// Append-only enrollment log. Not thread-safe; the service serializes writers.
class RecordLog {
public:
    /// Opens or creates the log. A torn record at the tail (crash mid-append) is
    /// cut off. Throws StorageError if the log belongs to a different model.
    RecordLog(std::filesystem::path path, std::string model_tag);

    /// Records recovered at open time, in append order.
    const std::vector<StoredPerson>& recovered() const noexcept { return recovered_; }
    std::size_t recovered_tail_bytes() const noexcept { return dropped_bytes_; }

    /// Appends and fsyncs. On failure the file is truncated back and StorageError thrown.
    void append(const StoredPerson& person);

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::string model_tag_;
    std::vector<StoredPerson> recovered_;
    std::size_t dropped_bytes_ = 0;
};

/// Content-addressed photo store: <dir>/<sha256>.<ext>.
class BlobStore {
public:
    explicit BlobStore(std::filesystem::path dir);

    /// Returns the blob reference ("<sha256>.<ext>"). Idempotent.
    std::string put(std::span<const std::uint8_t> bytes, std::string_view ext);
    std::filesystem::path path_of(std::string_view ref) const { return dir_ / std::string(ref); }

private:
    std::filesystem::path dir_;
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace hogface::portal
