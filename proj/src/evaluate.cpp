#include "shelf/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "shelf/simulate.hpp"
#include "shelf/text.hpp"

namespace shelf {

using nlohmann::json;

json to_json(const EvalReport& r) {
    json success = json::object();
    for (const auto& [p, rate] : r.fetch_success_at_k) success[std::to_string(p)] = rate;
    json out = {
        {"config",
         {{"holdout", r.config.holdout}, {"seed", r.config.seed}, {"k", r.config.k}, {"max_prefix", r.config.max_prefix}}},
        {"train_searches", r.train_searches},
        {"heldout_searches", r.heldout_searches},
        {"fetch_targets", r.fetch_targets},
        {"unavailable_targets", r.unavailable_targets},
        {"fetch_success_at_k", {{"k", r.config.k}, {"by_prefix_length", success}}},
        {"dead_end_rate", {{"matches_only", r.dead_end_rate_matches_only}, {"full", r.dead_end_rate_full}}},
        {"recommendation_popularity",
         {{"gini", r.recommendation_gini},
          {"mean_popularity", r.recommendation_mean_popularity},
          {"catalog_mean_popularity", r.catalog_mean_popularity}}},
        {"groups",
         {{"pages", r.pages}, {"mean_groups_per_page", r.mean_groups_per_page}, {"dedup_violations", r.dedup_violations}}},
    };
    if (!r.generator.is_null()) out["generator"] = r.generator;
    return out;
}

double gini(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    double total = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        total += values[i];
        weighted += static_cast<double>(i + 1) * values[i];
    }
    if (total <= 0.0) return 0.0;
    const double n = static_cast<double>(values.size());
    return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

std::size_t dedup_violations(const SearchPage& page) {
    std::unordered_map<EntityId, std::size_t> seen;
    for (const auto& g : page.groups) {
        for (EntityId id : g.videos) ++seen[id];
    }
    std::size_t violations = 0;
    for (const auto& [id, n] : seen) {
        if (n > 1) ++violations;
    }
    return violations;
}

EvalReport evaluate(const Catalog& catalog, const InteractionLog& log, const RelevanceModel& model,
                    const EditorialConfig& editorial, const EngineConfig& engine, const EvalConfig& config) {
    if (!(config.holdout > 0.0 && config.holdout < 1.0)) throw std::invalid_argument("holdout must lie in (0,1)");
    if (config.k < 1) throw std::invalid_argument("k must be >= 1");

    EvalReport report;
    report.config = config;

    std::vector<std::size_t> order(log.searches.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(config.seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const auto n_holdout = static_cast<std::size_t>(std::llround(config.holdout * static_cast<double>(order.size())));
    std::vector<std::size_t> heldout(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_holdout));
    std::sort(heldout.begin(), heldout.end());
    const std::unordered_set<std::size_t> heldout_set(heldout.begin(), heldout.end());

    InteractionLog train_log;
    train_log.plays = log.plays;
    for (std::size_t i = 0; i < log.searches.size(); ++i) {
        if (!heldout_set.contains(i)) train_log.searches.push_back(log.searches[i]);
    }
    report.train_searches = train_log.searches.size();
    report.heldout_searches = heldout.size();

    const auto snapshot = build_snapshot(catalog, train_log, model, editorial, engine, 1);

    std::unordered_map<EntityId, double> exposure;
    double exposure_popularity = 0.0;
    std::size_t exposure_total = 0;
    std::size_t group_total = 0;
    auto record_page = [&](const PipelineResult& result, bool full) {
        ++report.pages;
        report.dedup_violations += dedup_violations(result.page);
        if (!full) return;
        group_total += result.page.groups.size();
        for (const auto& rec : result.recommendations) {
            exposure[rec.video] += 1.0;
            exposure_popularity += catalog.popularity(rec.video);
            ++exposure_total;
        }
    };

    std::map<std::size_t, std::size_t> hits;
    std::size_t dead_matches_only = 0, dead_full = 0;
    for (std::size_t idx : heldout) {
        const SearchEvent& event = log.searches[idx];
        const Video* target = catalog.find_video(event.selected);
        if (!target) continue;
        if (target->available) {
            ++report.fetch_targets;
            const std::string title = normalize(target->title);
            const std::size_t length = char_count(title);
            for (std::size_t p = 1; p <= config.max_prefix; ++p) {
                const SearchRequest request{std::string(char_prefix(title, std::min(p, length))), config.k,
                                            RetrievalPolicy::Full};
                const auto result = run_pipeline(*snapshot, request);
                record_page(result, true);
                const bool found = std::any_of(result.ranked.begin(), result.ranked.end(),
                                               [&](const ScoredResult& r) { return r.video == target->id; });
                if (found) ++hits[p];
            }
        } else {
            ++report.unavailable_targets;
            const auto matches_only =
                run_pipeline(*snapshot, SearchRequest{event.query, config.k, RetrievalPolicy::MatchesOnly});
            const auto full = run_pipeline(*snapshot, SearchRequest{event.query, config.k, RetrievalPolicy::Full});
            record_page(matches_only, false);
            record_page(full, true);
            if (matches_only.page.groups.empty()) ++dead_matches_only;
            if (full.page.groups.empty()) ++dead_full;
        }
    }

    for (std::size_t p = 1; p <= config.max_prefix; ++p) {
        report.fetch_success_at_k[p] =
            report.fetch_targets ? static_cast<double>(hits[p]) / static_cast<double>(report.fetch_targets) : 0.0;
    }
    if (report.unavailable_targets) {
        report.dead_end_rate_matches_only =
            static_cast<double>(dead_matches_only) / static_cast<double>(report.unavailable_targets);
        report.dead_end_rate_full = static_cast<double>(dead_full) / static_cast<double>(report.unavailable_targets);
    }

    std::vector<double> counts;
    double popularity_total = 0.0;
    for (const auto& v : catalog.videos()) {
        popularity_total += v.popularity;
        if (!v.available) continue;
        auto it = exposure.find(v.id);
        counts.push_back(it == exposure.end() ? 0.0 : it->second);
    }
    report.recommendation_gini = gini(std::move(counts));
    report.recommendation_mean_popularity =
        exposure_total ? exposure_popularity / static_cast<double>(exposure_total) : 0.0;
    report.catalog_mean_popularity =
        catalog.videos().empty() ? 0.0 : popularity_total / static_cast<double>(catalog.videos().size());

    const std::size_t full_pages = report.fetch_targets * config.max_prefix + report.unavailable_targets;
    report.mean_groups_per_page = full_pages ? static_cast<double>(group_total) / static_cast<double>(full_pages) : 0.0;
    return report;
}

}  // namespace shelf
