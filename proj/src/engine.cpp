#include "shelf/engine.hpp"

#include <algorithm>
#include <atomic>

namespace shelf {

std::shared_ptr<const EngineSnapshot> build_snapshot(Catalog catalog, const InteractionLog& log,
                                                     RelevanceModel model, EditorialConfig editorial,
                                                     EngineConfig config, std::uint64_t version) {
    auto snapshot = std::make_shared<EngineSnapshot>();
    snapshot->index = InstantIndex::build(catalog, config.match);
    snapshot->coplay = CoPlayModel::build(log, config.min_support);
    snapshot->associations = QueryAssociationModel::build(log);
    snapshot->catalog = std::move(catalog);
    snapshot->model = model;
    snapshot->editorial = std::move(editorial);
    snapshot->config = config;
    snapshot->version = version;
    snapshot->play_events = log.plays.size();
    snapshot->search_events = log.searches.size();
    return snapshot;
}

std::shared_ptr<const EngineSnapshot> load_snapshot(const SnapshotSources& sources, EngineConfig config,
                                                    std::uint64_t version) {
    Catalog catalog = load_catalog_file(sources.catalog);
    InteractionLog log;
    if (sources.logs) log = load_logs_file(*sources.logs, catalog);
    RelevanceModel model = sources.model ? load_relevance_model(*sources.model) : default_relevance_model();
    EditorialConfig editorial =
        sources.groups ? load_editorial_config_file(*sources.groups) : default_editorial_config();
    return build_snapshot(std::move(catalog), log, model, std::move(editorial), config, version);
}

PipelineResult run_pipeline(const EngineSnapshot& snapshot, const SearchRequest& request) {
    PipelineResult result;
    const Catalog& catalog = snapshot.catalog;

    result.matches = snapshot.index.match_prefix(request.query);
    result.facets = detect_facet(request.query, result.matches, snapshot.associations, catalog,
                                 snapshot.config.facet_weights);
    result.intent = estimate_intent(result.facets);

    if (request.policy == RetrievalPolicy::Full) {
        std::vector<ContextAnchor> anchors;
        for (Facet f : kAllFacets) {
            if (auto anchor = result.facets.anchor(f)) anchors.push_back({*anchor, result.facets.probability(f)});
        }
        result.recommendations = recommend_for_context(anchors, request.query, snapshot.coplay,
                                                       snapshot.associations, catalog, request.k);
    }
    result.ranked = blend_and_rank(result.matches, result.recommendations, snapshot.model, result.facets,
                                   request.query, catalog, request.k);

    const auto candidates = generate_candidates(result.ranked, result.facets, catalog, snapshot.editorial.definitions);
    RankParams params = snapshot.editorial.params;
    params.specificity = result.facets.specificity;
    auto groups = rank_groups(candidates, result.ranked, params);

    std::vector<std::string> pills;
    if (result.facets.argmax() == Facet::UnavailableVideo) {
        if (auto anchor = result.facets.anchor(Facet::UnavailableVideo)) {
            pills = make_pills(*anchor, catalog, result.ranked, snapshot.editorial.max_pills);
        }
    }
    result.page = compose_page(std::move(groups), result.facets, result.intent, std::move(pills));
    return result;
}

SearchResponse to_response(const EngineSnapshot& snapshot, const SearchRequest& request,
                           const PipelineResult& result, double elapsed_ms) {
    SearchResponse response;
    response.query = request.query;
    response.distribution = result.page.facets.distribution;
    response.specificity = result.page.facets.specificity;
    response.fetch_probability = result.page.intent.fetch_probability;
    for (const auto& g : result.page.groups) {
        WireGroup wire{g.header, g.evidence.definition, g.evidence.anchor, {}};
        for (EntityId id : g.videos) {
            auto it = std::find_if(result.ranked.begin(), result.ranked.end(),
                                   [&](const ScoredResult& r) { return r.video == id; });
            const Video* v = snapshot.catalog.find_video(id);
            wire.videos.push_back(WireVideo{id, v ? v->title : std::string(), v && v->available,
                                            it != result.ranked.end() ? it->score : 0.0,
                                            it != result.ranked.end() ? it->provenance : Provenance::Match});
        }
        response.groups.push_back(std::move(wire));
    }
    response.pills = result.page.pills;
    response.timing_ms = elapsed_ms;
    response.snapshot = snapshot.version;
    return response;
}

SearchResponse handle_search(const EngineSnapshot& snapshot, const SearchRequest& request) {
    const auto start = std::chrono::steady_clock::now();
    const PipelineResult result = run_pipeline(snapshot, request);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    return to_response(snapshot, request, result, elapsed.count());
}

SearchService::SearchService(SnapshotSources sources, EngineConfig config)
    : sources_(std::move(sources)), config_(config), started_(std::chrono::steady_clock::now()) {
    current_ = load_snapshot(sources_, config_, 1);
}

SearchService::SearchService(std::shared_ptr<const EngineSnapshot> initial, SnapshotSources sources)
    : current_(std::move(initial)), sources_(std::move(sources)), started_(std::chrono::steady_clock::now()) {
    if (!current_) throw std::invalid_argument("initial snapshot must not be null");
    config_ = current_->config;
}

std::shared_ptr<const EngineSnapshot> SearchService::snapshot() const { return std::atomic_load(&current_); }

SearchResponse SearchService::search(const SearchRequest& request) const {
    const auto snap = snapshot();
    return handle_search(*snap, request);
}

ReloadOutcome SearchService::rebuild(const SnapshotSources& sources) {
    const auto next_version = std::atomic_load(&current_)->version + 1;
    try {
        auto fresh = load_snapshot(sources, config_, next_version);
        std::atomic_store(&current_, std::move(fresh));
        return {true, next_version, {}};
    } catch (const std::exception& e) {
        return {false, std::atomic_load(&current_)->version, e.what()};
    }
}

ReloadOutcome SearchService::reload() {
    std::lock_guard lock(reload_mutex_);
    return rebuild(sources_);
}

ReloadOutcome SearchService::reload(const SnapshotSources& sources) {
    std::lock_guard lock(reload_mutex_);
    auto outcome = rebuild(sources);
    if (outcome.ok) sources_ = sources;
    return outcome;
}

HealthStatus SearchService::health() const {
    const auto snap = snapshot();
    HealthStatus h;
    h.snapshot = snap->version;
    h.videos = snap->catalog.videos().size();
    h.talents = snap->catalog.talents().size();
    h.collections = snap->catalog.collections().size();
    h.entities = snap->catalog.size();
    h.play_events = snap->play_events;
    h.search_events = snap->search_events;
    h.uptime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    return h;
}

}  // namespace shelf
