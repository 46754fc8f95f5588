#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shelf/behavior.hpp"
#include "shelf/catalog.hpp"
#include "shelf/facet.hpp"
#include "shelf/instant_index.hpp"
#include "shelf/organizer.hpp"
#include "shelf/ranker.hpp"
#include "shelf/wire.hpp"

namespace shelf {

struct EngineConfig {
    std::size_t default_k = 40;
    std::size_t max_k = 500;
    std::uint32_t min_support = 1;
    FacetWeights facet_weights;
    MatchParams match;
};

/// Everything one request needs, built from a single catalog version and
/// never mutated afterwards.
struct EngineSnapshot {
    Catalog catalog;
    InstantIndex index;
    CoPlayModel coplay;
    QueryAssociationModel associations;
    RelevanceModel model;
    EditorialConfig editorial;
    EngineConfig config;
    std::uint64_t version = 1;
    std::size_t play_events = 0;
    std::size_t search_events = 0;
};

std::shared_ptr<const EngineSnapshot> build_snapshot(Catalog catalog, const InteractionLog& log,
                                                     RelevanceModel model, EditorialConfig editorial,
                                                     EngineConfig config = {}, std::uint64_t version = 1);

/// File locations for a snapshot. Empty optional paths fall back to an empty
/// log, the default relevance model and the default editorial config.
struct SnapshotSources {
    std::string catalog;
    std::optional<std::string> logs;
    std::optional<std::string> model;
    std::optional<std::string> groups;
};

std::shared_ptr<const EngineSnapshot> load_snapshot(const SnapshotSources& sources, EngineConfig config = {},
                                                    std::uint64_t version = 1);

enum class RetrievalPolicy { Full, MatchesOnly };

struct SearchRequest {
    std::string query;
    std::size_t k = 40;
    RetrievalPolicy policy = RetrievalPolicy::Full;
};

/// Intermediate products of one pipeline run.
struct PipelineResult {
    std::vector<SearchMatch> matches;
    FacetEstimate facets;
    IntentEstimate intent;
    std::vector<SearchRecommendation> recommendations;
    std::vector<ScoredResult> ranked;
    SearchPage page;
};

PipelineResult run_pipeline(const EngineSnapshot& snapshot, const SearchRequest& request);

SearchResponse to_response(const EngineSnapshot& snapshot, const SearchRequest& request,
                           const PipelineResult& result, double elapsed_ms);

/// Full per-keystroke pipeline with timing. Deterministic for a fixed
/// snapshot apart from `timing_ms`.
SearchResponse handle_search(const EngineSnapshot& snapshot, const SearchRequest& request);

struct HealthStatus {
    std::uint64_t snapshot = 0;
    std::size_t videos = 0;
    std::size_t talents = 0;
    std::size_t collections = 0;
    std::size_t entities = 0;
    std::size_t play_events = 0;
    std::size_t search_events = 0;
    double uptime_s = 0.0;
};

struct ReloadOutcome {
    bool ok = false;
    std::uint64_t snapshot = 0;
    std::string error;
};

/// Serves requests against the current snapshot while a reloader builds its
/// replacement. Readers never block on a reload.
class SearchService {
public:
    SearchService(SnapshotSources sources, EngineConfig config = {});
    explicit SearchService(std::shared_ptr<const EngineSnapshot> initial, SnapshotSources sources = {});

    std::shared_ptr<const EngineSnapshot> snapshot() const;

    SearchResponse search(const SearchRequest& request) const;

    /// Rebuilds from the configured sources. On failure the previous
    /// snapshot keeps serving and the error is reported.
    ReloadOutcome reload();
    /// Same, switching to `sources` only if the build succeeds.
    ReloadOutcome reload(const SnapshotSources& sources);

    HealthStatus health() const;

private:
    ReloadOutcome rebuild(const SnapshotSources& sources);

    std::shared_ptr<const EngineSnapshot> current_;
    std::mutex reload_mutex_;
    SnapshotSources sources_;
    EngineConfig config_;
    std::chrono::steady_clock::time_point started_;
};

}  // namespace shelf
