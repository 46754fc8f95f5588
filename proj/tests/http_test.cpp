#include <thread>

#include <doctest.h>
#include <httplib.h>

#include "fixtures.hpp"
#include "shelf/http_server.hpp"

using namespace shelf;
using nlohmann::json;

namespace {

class RunningServer {
public:
    explicit RunningServer(SearchService& service) {
        register_routes(server_, service);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~RunningServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

SnapshotSources sonic_sources() {
    return {fixture("sonic_catalog.jsonl"), fixture("sonic_logs.jsonl"), std::nullopt, fixture("sonic_groups.json")};
}

}  // namespace

TEST_SUITE("http") {
    TEST_CASE("search endpoint serves the documented schema") {
        SearchService service(sonic_sources());
        RunningServer server(service);
        auto client = server.client();

        const auto res = client.Get("/search?q=sonic%20t&k=40");
        REQUIRE(res);
        CHECK(res->status == 200);
        CHECK(res->get_header_value("Content-Type") == "application/json");
        const auto body = json::parse(res->body);
        const auto response = search_response_from_json(body);
        CHECK(response.query == "sonic t");
        REQUIRE_FALSE(response.groups.empty());
        CHECK(response.groups[0].header == "Fans of 'Sonic the Hedgehog' have watched these");
        CHECK(body.at("facets").at("distribution").size() == 4);
        CHECK(body.at("snapshot") == 1);

        auto expected = to_json(service.search(SearchRequest{"sonic t", 40}));
        auto got = body;
        expected.erase("timing_ms");
        got.erase("timing_ms");
        CHECK(got == expected);
    }

    TEST_CASE("k defaults, bounds and the profile parameter") {
        SearchService service(sonic_sources());
        RunningServer server(service);
        auto client = server.client();

        const auto plain = client.Get("/search?q=s");
        REQUIRE(plain);
        CHECK(plain->status == 200);
        const auto with_profile = client.Get("/search?q=s&profile=p1");
        REQUIRE(with_profile);
        auto a = json::parse(plain->body), b = json::parse(with_profile->body);
        a.erase("timing_ms");
        b.erase("timing_ms");
        CHECK(a == b);

        for (std::string bad : {"0", "-1", "abc", "3.5", "501", ""}) {
            const auto res = client.Get("/search?q=s&k=" + bad);
            REQUIRE(res);
            CHECK_MESSAGE(res->status == 400, "k=" << bad);
            CHECK(json::parse(res->body).contains("error"));
        }
        const auto small = client.Get("/search?q=sonic&k=1");
        REQUIRE(small);
        CHECK(small->status == 200);

        const auto empty = client.Get("/search");
        REQUIRE(empty);
        CHECK(empty->status == 200);
        CHECK(json::parse(empty->body).at("groups").empty());
    }

    TEST_CASE("health and reload") {
        SearchService service(sonic_sources());
        RunningServer server(service);
        auto client = server.client();

        auto health = client.Get("/health");
        REQUIRE(health);
        CHECK(health->status == 200);
        auto h = json::parse(health->body);
        CHECK(h.at("snapshot") == 1);
        CHECK(h.at("entities") == 16);

        const auto reload = client.Post("/reload", "", "application/json");
        REQUIRE(reload);
        CHECK(reload->status == 200);
        CHECK(json::parse(reload->body).at("snapshot") == 2);

        health = client.Get("/health");
        REQUIRE(health);
        CHECK(json::parse(health->body).at("snapshot") == 2);

        const auto wrong_method = client.Get("/reload");
        REQUIRE(wrong_method);
        CHECK(wrong_method->status == 404);
    }

    TEST_CASE("failed reload answers 500 and keeps serving") {
        auto initial = load_snapshot(sonic_sources());
        SnapshotSources broken = sonic_sources();
        broken.catalog = fixture("does_not_exist.jsonl");
        SearchService service(initial, broken);
        RunningServer server(service);
        auto client = server.client();

        const auto reload = client.Post("/reload", "", "application/json");
        REQUIRE(reload);
        CHECK(reload->status == 500);
        const auto body = json::parse(reload->body);
        CHECK(body.at("snapshot") == 1);
        CHECK(body.at("error").get<std::string>().find("does_not_exist") != std::string::npos);

        const auto search = client.Get("/search?q=sonic%20t");
        REQUIRE(search);
        CHECK(search->status == 200);
    }
}
