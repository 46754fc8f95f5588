// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "shelf/engine.hpp"
#include "shelf/evaluate.hpp"
#include "shelf/text.hpp"
#include "support/oracles.hpp"

using namespace shelf;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
        outcome = check();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s  %-22s %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

Outcome index_oracle() {
    const auto start = Clock::now();
    Rng rng(2024);
    std::size_t queries = 0, mismatches = 0;
    std::string first;
    for (int round = 0; round < 50; ++round) {
        const Catalog catalog = oracle::random_catalog(rng, 200);
        const InstantIndex index = InstantIndex::build(catalog);
        for (const auto& v : catalog.videos()) {
            const std::string title = normalize(v.title);
            for (std::size_t p = 1; p <= char_count(title); ++p) {
                const std::string q(char_prefix(title, p));
                ++queries;
                const auto same = oracle::compare_matches(index.match_prefix(q), oracle::brute_match(catalog, q));
                if (!same.ok) {
                    ++mismatches;
                    if (first.empty()) first = "'" + q + "': " + same.detail;
                }
            }
        }
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return {mismatches == 0 && seconds < 60.0,
            fmt("50 catalogs, %zu prefix queries, %zu mismatches, %.1fs < 60s %s", queries, mismatches, seconds,
                first.c_str())};
}

Outcome cf_oracle() {
    Rng rng(99);
    double worst = 0.0;
    std::size_t count_errors = 0, pairs = 0;
    for (int round = 0; round < 20; ++round) {
        std::vector<EntityId> videos;
        const std::size_t n_videos = 2 + rng.below(19);
        for (std::uint64_t i = 1; i <= n_videos; ++i) videos.push_back(EntityId{i});
        const auto log = oracle::random_plays(rng, videos, 50, 8);
        const std::uint32_t support = 1 + static_cast<std::uint32_t>(rng.below(3));
        const auto model = CoPlayModel::build(log, support);
        const auto counts = oracle::brute_coplay(log, support);
        for (EntityId i : videos) {
            for (EntityId j : videos) {
                ++pairs;
                auto it = counts.find({i, j});
                if (model.co_count(i, j) != (it == counts.end() ? 0u : it->second)) ++count_errors;
                const double want = oracle::brute_similarity(counts, i, j);
                if (want < 0.0) {
                    try {
                        item_similarity(model, i, j);
                        ++count_errors;
                    } catch (const UndefinedItemError&) {
                    }
                    continue;
                }
                worst = std::max(worst, std::abs(item_similarity(model, i, j) - want));
            }
        }
    }
    return {count_errors == 0 && worst <= 1e-9,
            fmt("20 logs, %zu pairs, %zu count errors, max |sim diff| %.2e <= 1e-9", pairs, count_errors, worst)};
}

Outcome ranker_gradients() {
    Rng rng(4242);
    double worst = 0.0;
    for (int point = 0; point < 100; ++point) {
        const auto examples = oracle::random_examples(rng, 1 + rng.below(64));
        RelevanceModel m;
        for (double& w : m.weights) w = 6.0 * rng.uniform() - 3.0;
        m.bias = 6.0 * rng.uniform() - 3.0;
        worst = std::max(worst, oracle::gradient_check(m, examples, 1e-4 + rng.uniform()));
    }
    std::size_t increases = 0, steps = 0;
    for (int fixture = 0; fixture < 10; ++fixture) {
        auto examples = oracle::random_examples(rng, 20 + rng.below(100));
        examples[0].label = 0;
        examples[1].label = 1;
        const auto result = train(examples, TrainConfig{0.01, 500, 1e-4});
        for (std::size_t i = 1; i < result.loss_history.size(); ++i, ++steps) {
            if (result.loss_history[i] > result.loss_history[i - 1]) ++increases;
        }
    }
    return {worst < 1e-6 && increases == 0,
            fmt("max rel err %.2e < 1e-6 over 100 points; %zu loss increases in %zu steps at lr 0.01", worst, increases,
                steps)};
}

std::size_t greedy_vs_exhaustive(const std::vector<CandidateGroup>& candidates, const std::vector<ScoredResult>& ranked,
                                 const RankParams& params) {
    std::map<EntityId, double> scores;
    for (const auto& r : ranked) scores[r.video] = r.score;
    const auto groups = rank_groups(candidates, ranked, params);
    std::vector<std::size_t> order;
    for (const auto& g : groups) {
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (candidates[c].header == g.header && candidates[c].evidence == g.evidence) {
                order.push_back(c);
                break;
            }
        }
    }
    bool feasible = false;
    const auto values = oracle::replay_order(candidates, scores, params, order, &feasible);
    const auto best = oracle::exhaustive_best(candidates, scores, params);
    if (!feasible || values.size() != best.size()) return 1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i] - best[i]) > 1e-9 * std::max(1.0, std::abs(best[i]))) return 1;
    }
    return 0;
}

Outcome organizer() {
    const Catalog catalog = generate_catalog(CatalogGenConfig{600, 80, 20, 17, 0.2});
    SimConfig sim;
    sim.n_fetch_sessions = 600;
    sim.n_explore_sessions = 600;
    sim.seed = 17;
    const auto log = simulate_log(sim, catalog);
    const auto snapshot = build_snapshot(catalog, log, default_relevance_model(), default_editorial_config());

    Rng rng(31337);
    std::size_t violations = 0, size_errors = 0, pages_with_groups = 0, oracle_fixtures = 0, oracle_mismatches = 0;
    for (int run = 0; run < 1000; ++run) {
        const auto& v = catalog.videos()[rng.below(catalog.videos().size())];
        const std::string title = normalize(v.title);
        const std::string q(char_prefix(title, 1 + rng.below(char_count(title))));
        const auto result = run_pipeline(*snapshot, SearchRequest{q, 5 + rng.below(80), RetrievalPolicy::Full});
        violations += dedup_violations(result.page);
        if (!result.page.groups.empty()) ++pages_with_groups;
        const auto candidates =
            generate_candidates(result.ranked, result.facets, catalog, snapshot->editorial.definitions);
        for (const auto& g : result.page.groups) {
            for (const auto& c : candidates) {
                if (c.header == g.header && (g.videos.size() < c.min_size || g.videos.size() > c.max_size)) ++size_errors;
            }
        }
        if (candidates.size() <= 6) {
            RankParams params = snapshot->editorial.params;
            params.specificity = result.facets.specificity;
            ++oracle_fixtures;
            oracle_mismatches += greedy_vs_exhaustive(candidates, result.ranked, params);
        }
    }
    for (int round = 0; round < 500; ++round) {
        const auto fx = oracle::random_groups(rng, 1 + rng.below(6), 3 + rng.below(10));
        RankParams params;
        params.lambda_div = rng.uniform();
        params.specificity = rng.uniform();
        params.max_groups = 1 + rng.below(6);
        ++oracle_fixtures;
        oracle_mismatches += greedy_vs_exhaustive(fx.candidates, fx.ranked, params);
    }
    return {violations == 0 && size_errors == 0 && oracle_mismatches == 0 && pages_with_groups > 0,
            fmt("1000 pipeline runs (%zu with groups): %zu dedup violations, %zu size errors; "
                "greedy vs exhaustive on %zu fixtures: %zu mismatches",
                pages_with_groups, violations, size_errors, oracle_fixtures, oracle_mismatches)};
}

Outcome sonic_fixture() {
    const SnapshotSources sources{fixture("sonic_catalog.jsonl"), fixture("sonic_logs.jsonl"), std::nullopt,
                                  fixture("sonic_groups.json")};
    const auto snapshot = load_snapshot(sources);
    const auto matches_only = run_pipeline(*snapshot, SearchRequest{"sonic t", 40, RetrievalPolicy::MatchesOnly});
    std::set<std::string> playable;
    for (const auto& r : matches_only.ranked) playable.insert(snapshot->catalog.display_name(r.video));
    const bool only_sonic_x = playable == std::set<std::string>{"Sonic X"};

    const auto full = run_pipeline(*snapshot, SearchRequest{"sonic t", 40, RetrievalPolicy::Full});
    const std::string fans = "Fans of 'Sonic the Hedgehog' have watched these";
    bool has_fans = false;
    for (const auto& g : full.page.groups) has_fans = has_fans || g.header == fans;
    auto has_pill = [&](const std::string& p) {
        return std::find(full.page.pills.begin(), full.page.pills.end(), p) != full.page.pills.end();
    };
    const auto anchor = full.facets.anchor(Facet::UnavailableVideo);
    const bool facet_ok = full.facets.argmax() == Facet::UnavailableVideo && anchor &&
                          snapshot->catalog.display_name(*anchor) == "Sonic the Hedgehog";

    auto body = to_json(handle_search(*snapshot, SearchRequest{"sonic t"}));
    body.erase("timing_ms");
    std::ifstream golden_in(fixture("sonic_t_golden.json"));
    const bool golden = body == nlohmann::json::parse(golden_in);

    const bool pass = only_sonic_x && !full.page.groups.empty() && has_fans && has_pill("Myths & Legends") &&
                      has_pill("Chases") && facet_ok && golden;
    return {pass, fmt("matches-only={Sonic X}:%d fans header:%d pills M&L:%d Chases:%d argmax Unavailable/Hedgehog:%d "
                      "golden:%d groups:%zu",
                      only_sonic_x, has_fans, has_pill("Myths & Legends"), has_pill("Chases"), facet_ok, golden,
                      full.page.groups.size())};
}

Outcome dead_ends() {
    const Catalog catalog = generate_catalog(CatalogGenConfig{2000, 300, 40, 11, 0.15});
    SimConfig sim;
    sim.n_fetch_sessions = 2000;
    sim.n_explore_sessions = 2000;
    sim.seed = 7;
    const auto log = simulate_log(sim, catalog);
    const auto r = evaluate(catalog, log, default_relevance_model(), default_editorial_config(), {}, EvalConfig{});
    return {r.unavailable_targets > 0 && r.dead_end_rate_matches_only > 0.0 &&
                r.dead_end_rate_full < r.dead_end_rate_matches_only,
            fmt("%zu unavailable-target queries: dead_end(full)=%.3f < dead_end(matches-only)=%.3f", r.unavailable_targets,
                r.dead_end_rate_full, r.dead_end_rate_matches_only)};
}

Outcome latency() {
    const Catalog catalog = generate_catalog(CatalogGenConfig{8500, 1460, 40, 101, 0.15});
    SimConfig sim;
    sim.n_profiles = 2000;
    sim.n_fetch_sessions = 10000;
    sim.n_explore_sessions = 16300;
    sim.seed = 101;
    const auto log = simulate_log(sim, catalog);
    const std::size_t events = log.plays.size() + log.searches.size();
    const auto snapshot = build_snapshot(catalog, log, default_relevance_model(), default_editorial_config());

    Rng rng(5);
    std::vector<double> ms;
    for (int i = 0; i < 1000; ++i) {
        std::string q;
        if (i % 2 == 0) {
            q = log.searches[rng.below(log.searches.size())].query;
        } else {
            const std::string title = normalize(catalog.videos()[rng.below(catalog.videos().size())].title);
            q = std::string(char_prefix(title, 1 + rng.below(char_count(title))));
        }
        const auto start = Clock::now();
        const auto response = handle_search(*snapshot, SearchRequest{q});
        ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
        if (response.query != q) return {false, "response does not echo the query"};
    }
    std::sort(ms.begin(), ms.end());
    const double p50 = ms[ms.size() / 2];
    const double p95 = ms[static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size()))) - 1];
    return {catalog.size() == 10000 && events >= 100000 && p95 < 50.0,
            fmt("%zu entities, %zu events, 1000 queries: p50 %.2f ms, p95 %.2f ms < 50 ms, max %.2f ms", catalog.size(),
                events, p50, p95, ms.back())};
}

Outcome determinism() {
    auto run = [] {
        const Catalog catalog = generate_catalog(CatalogGenConfig{800, 100, 20, 23, 0.2});
        SimConfig sim;
        sim.n_fetch_sessions = 800;
        sim.n_explore_sessions = 800;
        sim.seed = 23;
        std::ostringstream log_bytes;
        simulate_logs(sim, catalog, log_bytes);
        std::istringstream log_in(log_bytes.str());
        const auto log = load_logs(log_in, catalog);
        EvalConfig config;
        config.holdout = 0.5;
        const std::string report =
            to_json(evaluate(catalog, log, default_relevance_model(), default_editorial_config(), {}, config)).dump();
        const auto snapshot = build_snapshot(catalog, log, default_relevance_model(), default_editorial_config());
        std::string bodies;
        for (std::size_t i = 0; i < log.searches.size(); i += 7) {
            bodies += body_without_timing(handle_search(*snapshot, SearchRequest{log.searches[i].query}));
        }
        return std::tuple{log_bytes.str(), report, bodies};
    };
    const auto [log_a, report_a, bodies_a] = run();
    const auto [log_b, report_b, bodies_b] = run();
    const bool pass = log_a == log_b && report_a == report_b && bodies_a == bodies_b;
    return {pass, fmt("logs identical:%d, eval reports identical:%d, search bodies identical:%d (%zu bytes)",
                      log_a == log_b, report_a == report_b, bodies_a == bodies_b, bodies_a.size())};
}

}  // namespace

int main() {
    report("index-oracle", index_oracle);
    report("cf-oracle", cf_oracle);
    report("ranker-gradients", ranker_gradients);
    report("organizer", organizer);
    report("sonic-fixture", sonic_fixture);
    report("dead-ends", dead_ends);
    report("latency-p95", latency);
    report("determinism", determinism);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
