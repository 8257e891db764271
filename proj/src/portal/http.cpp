#include "hogface/portal/http.hpp"

#include <httplib.h>

#include <charconv>
#include <string>

#include "hogface/errors.hpp"

namespace hogface::portal {

using nlohmann::json;

json to_json(const PersonRecord& record) {
    return {{"id", record.id},
            {"name", record.name},
            {"status", status_name(record.status)},
            {"contact", record.contact},
            {"enrolled_at", record.enrolled_at},
            {"photo_refs", record.photo_refs}};
}

json to_json(const QueryResponse& response) {
    json candidates = json::array();
    for (const auto& c : response.candidates) {
        candidates.push_back({{"id", c.id},
                              {"name", c.name},
                              {"status", status_name(c.status)},
                              {"score", c.score},
                              {"votes", c.votes},
                              {"total_distance", c.total_distance}});
    }
    return {{"candidates", candidates}, {"model_version", response.model_version}};
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, status, {{"code", code}, {"message", message}});
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Runs a handler, mapping service exceptions onto status codes.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
    try {
        body();
    } catch (const ValidationError& e) {
        send_error(res, 422, "validation_error", e.what());
    } catch (const StorageError& e) {
        send_error(res, 503, "storage_unavailable", e.what());
    } catch (const IoError& e) {
        send_error(res, 503, "storage_unavailable", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "internal_error", e.what());
    }
}

bool require_photo(const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) {
        send_error(res, 400, "bad_request", "expected multipart/form-data");
        return false;
    }
    if (!req.has_file("photo") || req.get_file_value("photo").content.empty()) {
        send_error(res, 400, "missing_photo", "multipart part 'photo' is required");
        return false;
    }
    return true;
}

std::optional<EnrollRequest> read_metadata(const httplib::Request& req, httplib::Response& res) {
    EnrollRequest meta;
    if (req.has_file("metadata")) {
        const json j = json::parse(req.get_file_value("metadata").content, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            send_error(res, 400, "bad_metadata", "part 'metadata' must be a JSON object");
            return std::nullopt;
        }
        auto field = [&](const char* key) -> std::optional<std::string> {
            if (!j.contains(key)) return std::string();
            if (!j[key].is_string()) return std::nullopt;
            return j[key].get<std::string>();
        };
        const auto name = field("name");
        const auto status = field("status");
        const auto contact = field("contact");
        if (!name || !status || !contact) {
            send_error(res, 400, "bad_metadata", "metadata fields name, status, contact must be strings");
            return std::nullopt;
        }
        meta = {*name, *status, *contact};
    } else {
        auto part = [&](const char* key) { return req.has_file(key) ? req.get_file_value(key).content : std::string(); };
        meta = {part("name"), part("status"), part("contact")};
    }
    return meta;
}

}  // namespace

void install_routes(httplib::Server& server, Service& service) {
    server.Post("/api/persons", [&service](const httplib::Request& req, httplib::Response& res) {
        if (!require_photo(req, res)) return;
        const auto meta = read_metadata(req, res);
        if (!meta) return;
        guarded(res, [&] {
            const auto id = service.enroll(as_bytes(req.get_file_value("photo").content), *meta);
            send_json(res, 201, {{"id", id}});
        });
    });

    server.Post("/api/match", [&service](const httplib::Request& req, httplib::Response& res) {
        if (!require_photo(req, res)) return;
        std::size_t k = 5;
        if (req.has_param("k")) {
            const auto text = req.get_param_value("k");
            const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
            if (ec != std::errc() || end != text.data() + text.size() || k < 1) {
                send_error(res, 400, "bad_request", "k must be a positive integer");
                return;
            }
        }
        std::optional<Status> filter;
        if (req.has_param("status") && !req.get_param_value("status").empty()) {
            filter = parse_status(req.get_param_value("status"));
            if (!filter) {
                send_error(res, 400, "bad_request", "status must be 'missing' or 'found'");
                return;
            }
        }
        guarded(res, [&] {
            send_json(res, 200, to_json(service.query(as_bytes(req.get_file_value("photo").content), k, filter)));
        });
    });

    server.Get(R"(/api/persons/([^/]+))", [&service](const httplib::Request& req, httplib::Response& res) {
        const auto record = service.person(req.matches[1]);
        if (!record) {
            send_error(res, 404, "not_found", "no person with id " + std::string(req.matches[1]));
            return;
        }
        send_json(res, 200, to_json(*record));
    });

    server.Get("/api/health", [&service](const httplib::Request&, httplib::Response& res) {
        const auto h = service.health();
        send_json(res, 200, {{"model_version", h.model_version}, {"gallery_size", h.gallery_size}});
    });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        send_error(res, res.status, res.status == 404 ? "not_found" : "http_error",
                   httplib::status_message(res.status));
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "unknown error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        send_error(res, 500, "internal_error", message);
    });
}

}  // namespace hogface::portal
