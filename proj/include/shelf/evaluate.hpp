#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "shelf/engine.hpp"

namespace shelf {

struct EvalConfig {
    double holdout = 0.2;
    std::uint64_t seed = 7;
    std::size_t k = 10;
    std::size_t max_prefix = 10;
};

struct EvalReport {
    EvalConfig config;
    std::size_t train_searches = 0;
    std::size_t heldout_searches = 0;
    std::size_t fetch_targets = 0;        // held-out searches for available videos
    std::size_t unavailable_targets = 0;  // held-out searches for unavailable videos
    /// keystrokes -> fraction of available targets found in the top k
    std::map<std::size_t, double> fetch_success_at_k;
    double dead_end_rate_matches_only = 0.0;
    double dead_end_rate_full = 0.0;
    /// Gini coefficient of recommendation exposure over available videos.
    double recommendation_gini = 0.0;
    double recommendation_mean_popularity = 0.0;
    double catalog_mean_popularity = 0.0;
    double mean_groups_per_page = 0.0;
    std::size_t pages = 0;
    std::size_t dedup_violations = 0;
    /// Parameters of the generator that produced the log, when known.
    nlohmann::json generator;
};

nlohmann::json to_json(const EvalReport& report);

double gini(std::vector<double> values);

/// Count of video ids that appear in more than one group on a page.
std::size_t dedup_violations(const SearchPage& page);

/// Splits the search events with a seeded shuffle, builds a snapshot from the
/// training part (all plays plus the remaining searches) and replays the
/// held-out searches: available targets keystroke by keystroke for
/// fetch success, unavailable targets with their logged query under both the
/// matches-only and the full policy for the dead-end rate.
EvalReport evaluate(const Catalog& catalog, const InteractionLog& log, const RelevanceModel& model,
                    const EditorialConfig& editorial, const EngineConfig& engine, const EvalConfig& config);

}  // namespace shelf
