#pragma once

#include <string>

#include "shelf/engine.hpp"

namespace httplib {
class Server;
}

namespace shelf {

/// GET /search, GET /health and POST /reload on top of `service`.
/// The service must outlive the server.
void register_routes(httplib::Server& server, SearchService& service);

/// Binds and blocks until the process exits. Returns false when
/// the port cannot be bound.
bool serve_http(SearchService& service, const std::string& host, int port);

nlohmann::json to_json(const HealthStatus& health);

}  // namespace shelf
