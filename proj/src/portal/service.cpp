#include "hogface/portal/service.hpp"

#include <chrono>
#include <cstdio>
#include <random>

#include "hogface/classifier.hpp"
#include "hogface/errors.hpp"
#include "hogface/imgio.hpp"
#include "hogface/modelstore.hpp"
#include "hogface/portal/photo.hpp"

namespace fs = std::filesystem;

namespace hogface::portal {

Service::Service(Model model, std::string model_version, fs::path data_dir)
    : model_(std::move(model)),
      model_version_(std::move(model_version)),
      data_dir_(std::move(data_dir)),
      blobs_(data_dir_ / "blobs"),
      id_state_(std::random_device{}() ^ (std::uint64_t{std::random_device{}()} << 32)) {
    model_.check_consistent();
    log_ = std::make_unique<RecordLog>(data_dir_ / "records.log", model_version_);

    auto snap = std::make_shared<Snapshot>();
    for (const auto& stored : log_->recovered()) {
        const auto& rec = stored.record;
        if (snap->by_id.contains(rec.id)) throw StorageError("duplicate person id in log: " + rec.id);
        GalleryEntry entry{rec.id, stored.features, rec.photo_refs.empty() ? std::string() : rec.photo_refs.front()};
        snap->by_id.emplace(rec.id, snap->people.size());
        snap->people.push_back(std::make_shared<const Person>(Person{rec, std::move(entry)}));
    }
    // Entries written by a different model would have been rejected by the log's model tag.
    Model probe{model_.config, model_.bases, {}};
    for (const auto& p : snap->people) probe.gallery.push_back(p->entry);
    try {
        probe.check_consistent();
    } catch (const StateError& e) {
        throw StorageError(std::string("stored features do not fit the model: ") + e.what());
    }
    snapshot_ = std::move(snap);
}

std::unique_ptr<Service> Service::open(const fs::path& model_path, const fs::path& data_dir) {
    const auto bytes = read_file_bytes(model_path);
    Model model = deserialize_model(bytes);
    return std::make_unique<Service>(std::move(model), model_version_tag(bytes), data_dir);
}

std::shared_ptr<const Service::Snapshot> Service::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

std::vector<Matrix> Service::features_for(std::span<const std::uint8_t> photo) const {
    GrayImage image;
    try {
        image = decode_photo(photo);
    } catch (const DecodeError& e) {
        throw ValidationError(std::string("photo could not be decoded: ") + e.what());
    }
    return project_layers(image_layers(image, model_.config), model_.bases);
}

std::string Service::fresh_id(const Snapshot& snap) {
    std::mt19937_64 rng(id_state_);
    for (;;) {
        const auto v = rng();
        id_state_ = v;
        char buf[20];
        std::snprintf(buf, sizeof buf, "p%016llx", static_cast<unsigned long long>(v));
        if (!snap.by_id.contains(buf)) return buf;
    }
}

std::string Service::enroll(std::span<const std::uint8_t> photo, const EnrollRequest& request) {
    if (request.name.empty()) throw ValidationError("name must not be empty");
    const auto status = parse_status(request.status);
    if (!status) throw ValidationError("status must be 'missing' or 'found'");
    PhotoFormat format;
    try {
        format = sniff_format(photo);
    } catch (const DecodeError& e) {
        throw ValidationError(std::string("photo could not be decoded: ") + e.what());
    }
    auto features = features_for(photo);

    std::lock_guard writer(writer_mutex_);
    const auto current = snapshot();

    StoredPerson stored;
    stored.record.id = fresh_id(*current);
    stored.record.name = request.name;
    stored.record.status = *status;
    stored.record.contact = request.contact;
    stored.record.enrolled_at =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
    stored.record.photo_refs.push_back(blobs_.put(photo, extension(format)));
    stored.features = std::move(features);
    log_->append(stored);

    auto next = std::make_shared<Snapshot>(*current);
    GalleryEntry entry{stored.record.id, std::move(stored.features), stored.record.photo_refs.front()};
    next->by_id.emplace(stored.record.id, next->people.size());
    next->people.push_back(std::make_shared<const Person>(Person{stored.record, std::move(entry)}));
    {
        std::lock_guard lock(snapshot_mutex_);
        snapshot_ = std::move(next);
    }
    return stored.record.id;
}

QueryResponse Service::query(std::span<const std::uint8_t> photo, std::size_t k,
                             std::optional<Status> status_filter) const {
    if (k < 1) throw ValidationError("k must be at least 1");
    const auto features = features_for(photo);
    const auto snap = snapshot();

    QueryResponse response;
    response.model_version = model_version_;
    std::vector<const GalleryEntry*> view;
    view.reserve(snap->people.size());
    for (const auto& p : snap->people)
        if (!status_filter || p->record.status == *status_filter) view.push_back(&p->entry);
    if (view.empty()) return response;

    const auto ranked = rank_result(classify_features(features, view), k);
    for (const auto& r : ranked) {
        const auto& person = *snap->people[snap->by_id.at(r.label)];
        response.candidates.push_back(
            {person.record.id, person.record.name, person.record.status, r.score, r.votes, r.total_distance});
    }
    return response;
}

std::optional<PersonRecord> Service::person(const std::string& id) const {
    const auto snap = snapshot();
    const auto it = snap->by_id.find(id);
    if (it == snap->by_id.end()) return std::nullopt;
    return snap->people[it->second]->record;
}

Health Service::health() const { return {model_version_, snapshot()->people.size()}; }

}  // namespace hogface::portal
