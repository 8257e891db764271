#pragma once

#include <json.hpp>

#include "hogface/portal/service.hpp"

namespace httplib {
class Server;
}

namespace hogface::portal {

nlohmann::json to_json(const PersonRecord& record);
nlohmann::json to_json(const QueryResponse& response);

/// Registers the /api routes. All non-2xx responses carry {"code", "message"}.
void install_routes(httplib::Server& server, Service& service);

}  // namespace hogface::portal
