#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hogface/pipeline.hpp"
#include "hogface/portal/records.hpp"

namespace hogface::portal {

/// Client input rejected (undecodable photo, empty name, bad status): HTTP 422.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnrollRequest {
    std::string name;
    std::string status;  ///< "missing" or "found"
    std::string contact;
};

struct Candidate {
    std::string id;
    std::string name;
    Status status = Status::missing;
    double score = 0.0;
    std::size_t votes = 0;
    double total_distance = 0.0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct QueryResponse {
    std::vector<Candidate> candidates;
    std::string model_version;

    friend bool operator==(const QueryResponse&, const QueryResponse&) = default;
};

struct Health {
    std::string model_version;
    std::size_t gallery_size = 0;
};

/// Missing-and-found matching service over a trained model and a data directory.
///
/// Queries read an immutable snapshot of the gallery; enrollments are serialized,
/// persisted (photo blob, then the record log, fsynced) and only then published
/// by swapping in a new snapshot. A query never sees a half-enrolled person.
class Service {
public:
    /// Rebuilds the gallery from <data_dir>/records.log.
    Service(Model model, std::string model_version, std::filesystem::path data_dir);

    /// Loads the model file; its checksum becomes the model version.
    static std::unique_ptr<Service> open(const std::filesystem::path& model_path,
                                         const std::filesystem::path& data_dir);

    /// Returns the new person id. Throws ValidationError or StorageError.
    std::string enroll(std::span<const std::uint8_t> photo, const EnrollRequest& request);

    /// Ranked persons, at most k. An empty (or fully filtered) gallery gives no candidates.
    QueryResponse query(std::span<const std::uint8_t> photo, std::size_t k,
                        std::optional<Status> status_filter = std::nullopt) const;

    std::optional<PersonRecord> person(const std::string& id) const;
    Health health() const;
    const Model& model() const noexcept { return model_; }

private:
    struct Person {
        PersonRecord record;
        GalleryEntry entry;
    };
    struct Snapshot {
        std::vector<std::shared_ptr<const Person>> people;
        std::unordered_map<std::string, std::size_t> by_id;
    };

    std::shared_ptr<const Snapshot> snapshot() const;
    std::vector<Matrix> features_for(std::span<const std::uint8_t> photo) const;
    std::string fresh_id(const Snapshot& snap);

    Model model_;
    std::string model_version_;
    std::filesystem::path data_dir_;
    BlobStore blobs_;
    std::unique_ptr<RecordLog> log_;

    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::mutex writer_mutex_;
    std::uint64_t id_state_;
};

}  // namespace hogface::portal
