#include <set>
#include <sstream>

#include <doctest.h>

#include "fixtures.hpp"
#include "shelf/evaluate.hpp"
#include "shelf/simulate.hpp"
#include "shelf/text.hpp"

using namespace shelf;

TEST_SUITE("simulate") {
    TEST_CASE("rng helpers stay in range") {
        Rng rng(1);
        for (int i = 0; i < 1000; ++i) {
            CHECK(rng.below(7) < 7);
            const double u = rng.uniform();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
        CHECK(rng.weighted({0.0, 0.0, 5.0}) == 2);
        Rng a(99), b(99);
        for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
    }

    TEST_CASE("a fixed seed reproduces the same bytes") {
        const Catalog catalog = generate_catalog(CatalogGenConfig{200, 20, 10, 4, 0.2});
        SimConfig config;
        config.n_fetch_sessions = 200;
        config.n_explore_sessions = 200;
        std::ostringstream first, second;
        simulate_logs(config, catalog, first);
        simulate_logs(config, catalog, second);
        CHECK(first.str() == second.str());
        CHECK_FALSE(first.str().empty());

        config.seed += 1;
        std::ostringstream third;
        simulate_logs(config, catalog, third);
        CHECK(third.str() != first.str());
    }

    TEST_CASE("generated catalogs are reproducible") {
        std::ostringstream a, b;
        write_catalog_jsonl(generate_catalog(CatalogGenConfig{}), a);
        write_catalog_jsonl(generate_catalog(CatalogGenConfig{}), b);
        CHECK(a.str() == b.str());
        const Catalog c = generate_catalog(CatalogGenConfig{100, 10, 5, 1, 0.5});
        CHECK(c.videos().size() == 100);
        CHECK(c.talents().size() == 10);
        CHECK(c.collections().size() == 5);
    }

    TEST_CASE("fetch-only logs type prefixes of the selected title") {
        const Catalog catalog = generate_catalog(CatalogGenConfig{300, 30, 10, 9, 0.2});
        SimConfig config;
        config.n_fetch_sessions = 400;
        config.n_explore_sessions = 0;
        const auto log = simulate_log(config, catalog);
        REQUIRE(log.searches.size() == 400);
        for (const auto& s : log.searches) {
            const std::string title = normalize(catalog.find_video(s.selected)->title);
            CHECK(title.compare(0, s.query.size(), s.query) == 0);
            CHECK_FALSE(s.query.empty());
        }
    }

    TEST_CASE("event counts follow the session arithmetic") {
        const Catalog catalog = generate_catalog(CatalogGenConfig{});
        SimConfig config;
        config.n_profiles = 100;
        config.n_fetch_sessions = 400;
        config.n_explore_sessions = 600;
        const auto log = simulate_log(config, catalog);
        std::size_t available_targets = 0;
        for (const auto& s : log.searches) available_targets += catalog.find_video(s.selected)->available ? 1 : 0;
        CHECK(log.searches.size() == 400);
        CHECK(log.plays.size() == available_targets + 600 * config.plays_per_explore_session);

        std::set<std::string> profiles;
        for (const auto& p : log.plays) profiles.insert(p.profile);
        for (const auto& s : log.searches) profiles.insert(s.profile);
        CHECK(profiles.size() <= 100);
    }

    TEST_CASE("simulated logs load back against their catalog") {
        const Catalog catalog = generate_catalog(CatalogGenConfig{150, 10, 8, 2, 0.1});
        SimConfig config;
        config.n_fetch_sessions = 50;
        config.n_explore_sessions = 50;
        std::stringstream stream;
        simulate_logs(config, catalog, stream);
        const auto parsed = load_logs(stream, catalog);
        const auto direct = simulate_log(config, catalog);
        CHECK(parsed.plays.size() == direct.plays.size());
        CHECK(parsed.searches.size() == direct.searches.size());
    }

    TEST_CASE("a catalog without videos cannot be simulated") {
        std::ostringstream out;
        CHECK_THROWS_AS(simulate_logs(SimConfig{}, Catalog{}, out), ValidationError);
    }
}

TEST_SUITE("evaluate") {
    TEST_CASE("gini coefficient") {
        CHECK(gini({}) == 0.0);
        CHECK(gini({0, 0, 0}) == 0.0);
        CHECK(gini({2, 2, 2, 2}) == doctest::Approx(0.0));
        CHECK(gini({0, 0, 0, 1}) == doctest::Approx(0.75));
        CHECK(gini({1, 3}) == doctest::Approx(0.25));
    }

    TEST_CASE("dedup violation counter") {
        SearchPage page;
        page.groups = {{"a", {EntityId{1}, EntityId{2}}, {}}, {"b", {EntityId{2}, EntityId{3}}, {}}};
        CHECK(dedup_violations(page) == 1);
        page.groups.pop_back();
        CHECK(dedup_violations(page) == 0);
    }

    TEST_CASE("reports are deterministic and well formed") {
        const Catalog catalog = generate_catalog(CatalogGenConfig{300, 40, 12, 21, 0.2});
        SimConfig sim;
        sim.n_fetch_sessions = 200;
        sim.n_explore_sessions = 200;
        const auto log = simulate_log(sim, catalog);
        EvalConfig config;
        config.holdout = 0.5;
        const auto a = evaluate(catalog, log, default_relevance_model(), default_editorial_config(), {}, config);
        const auto b = evaluate(catalog, log, default_relevance_model(), default_editorial_config(), {}, config);
        CHECK(to_json(a).dump() == to_json(b).dump());
        CHECK(a.heldout_searches == 100);
        CHECK(a.train_searches == 100);
        CHECK(a.dedup_violations == 0);
        CHECK(a.fetch_success_at_k.size() == config.max_prefix);
        for (const auto& [p, rate] : a.fetch_success_at_k) {
            CHECK(rate >= 0.0);
            CHECK(rate <= 1.0);
        }
        for (double rate : {a.dead_end_rate_full, a.dead_end_rate_matches_only, a.recommendation_gini}) {
            CHECK(rate >= 0.0);
            CHECK(rate <= 1.0);
        }

        config.seed = 8;
        CHECK(to_json(evaluate(catalog, log, default_relevance_model(), default_editorial_config(), {}, config)).dump() !=
              to_json(a).dump());
        config.holdout = 1.0;
        CHECK_THROWS_AS(evaluate(catalog, log, default_relevance_model(), default_editorial_config(), {}, config),
                        std::invalid_argument);
    }

    TEST_CASE("k at least the catalog size finds every typed target") {
        const Catalog catalog = generate_catalog(CatalogGenConfig{120, 10, 6, 13, 0.2});
        SimConfig sim;
        sim.n_fetch_sessions = 150;
        sim.n_explore_sessions = 50;
        const auto log = simulate_log(sim, catalog);
        EvalConfig config;
        config.k = catalog.size();
        const auto report = evaluate(catalog, log, default_relevance_model(), default_editorial_config(), {}, config);
        REQUIRE(report.fetch_targets > 0);
        for (const auto& [p, rate] : report.fetch_success_at_k) CHECK(rate == 1.0);
    }

    TEST_CASE("full pipeline avoids dead ends on simulated data") {
        const Catalog catalog = generate_catalog(CatalogGenConfig{400, 40, 12, 31, 0.3});
        SimConfig sim;
        sim.n_fetch_sessions = 400;
        sim.n_explore_sessions = 400;
        const auto log = simulate_log(sim, catalog);
        const auto report = evaluate(catalog, log, default_relevance_model(), default_editorial_config(), {}, EvalConfig{});
        REQUIRE(report.unavailable_targets > 0);
        CHECK(report.dead_end_rate_matches_only > 0.0);
        CHECK(report.dead_end_rate_full < report.dead_end_rate_matches_only);
    }
}
