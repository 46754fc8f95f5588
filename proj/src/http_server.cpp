#include "shelf/http_server.hpp"

#include <charconv>

#include <httplib.h>

namespace shelf {

using nlohmann::json;

nlohmann::json to_json(const HealthStatus& h) {
    return {{"status", "ok"},
            {"snapshot", h.snapshot},
            {"entities", h.entities},
            {"videos", h.videos},
            {"talents", h.talents},
            {"collections", h.collections},
            {"play_events", h.play_events},
            {"search_events", h.search_events},
            {"uptime_s", h.uptime_s}};
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
    res.set_header("Access-Control-Allow-Origin", "*");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
}

}  // namespace

void register_routes(httplib::Server& server, SearchService& service) {
    server.Get("/search", [&service](const httplib::Request& req, httplib::Response& res) {
        const auto snap = service.snapshot();
        SearchRequest request;
        request.query = req.get_param_value("q");
        request.k = snap->config.default_k;
        if (req.has_param("k")) {
            const std::string raw = req.get_param_value("k");
            std::size_t k = 0;
            const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), k);
            if (ec != std::errc() || end != raw.data() + raw.size() || k < 1 || k > snap->config.max_k) {
                send_error(res, 400, "k must be an integer in [1, " + std::to_string(snap->config.max_k) + "]");
                return;
            }
            request.k = k;
        }
        try {
            send_json(res, 200, to_json(handle_search(*snap, request)));
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });

    server.Get("/health", [&service](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, to_json(service.health()));
    });

    server.Post("/reload", [&service](const httplib::Request&, httplib::Response& res) {
        const ReloadOutcome outcome = service.reload();
        if (outcome.ok) {
            send_json(res, 200, {{"status", "ok"}, {"snapshot", outcome.snapshot}});
        } else {
            send_json(res, 500, {{"status", "error"}, {"snapshot", outcome.snapshot}, {"error", outcome.error}});
        }
    });
}

bool serve_http(SearchService& service, const std::string& host, int port) {
    httplib::Server server;
    register_routes(server, service);
    if (!server.bind_to_port(host, port)) return false;
    return server.listen_after_bind();
}

}  // namespace shelf
