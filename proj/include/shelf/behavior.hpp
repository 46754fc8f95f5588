#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shelf/catalog.hpp"

namespace shelf {

struct PlayEvent {
    std::string profile;
    EntityId video;
    std::int64_t timestamp = 0;
};

struct SearchEvent {
    std::string profile;
    std::string query;  // as typed when the selection happened
    EntityId selected;
    int position = 0;
};

struct InteractionLog {
    std::vector<PlayEvent> plays;
    std::vector<SearchEvent> searches;

    bool empty() const noexcept { return plays.empty() && searches.empty(); }
};

/// JSONL with "kind": "play" | "search". Throws ParseError naming the line,
/// including for references to entities the catalog does not hold.
InteractionLog load_logs(std::istream& source, const Catalog& catalog);
InteractionLog load_logs_file(const std::string& path, const Catalog& catalog);

std::string to_jsonl(const PlayEvent& event);
std::string to_jsonl(const SearchEvent& event);

/// Binary co-play counts: c(i,j) is the number of distinct profiles that
/// played both i and j. Off-diagonal pairs below min_support are dropped.
class CoPlayModel {
public:
    struct Neighbor {
        EntityId video;
        std::uint32_t count;
        double similarity;  // cosine, precomputed at build time
    };

    CoPlayModel() = default;

    static CoPlayModel build(const InteractionLog& log, std::uint32_t min_support = 1);

    std::uint32_t item_count(EntityId video) const;
    /// c(i,j); the diagonal returns item_count.
    std::uint32_t co_count(EntityId i, EntityId j) const;
    /// Sorted by video id.
    std::span<const Neighbor> neighbors(EntityId video) const;

    std::uint32_t min_support() const noexcept { return min_support_; }
    std::size_t item_total() const noexcept { return items_.size(); }
    std::size_t pair_count() const noexcept { return pair_count_; }

private:
    struct Item {
        std::uint32_t count = 0;
        std::vector<Neighbor> neighbors;
    };

    std::uint32_t min_support_ = 1;
    std::size_t pair_count_ = 0;
    std::unordered_map<EntityId, Item> items_;
};

inline CoPlayModel build_coplay(const InteractionLog& log, std::uint32_t min_support) {
    return CoPlayModel::build(log, min_support);
}

/// Cosine over co-play counts, c(i,j) / sqrt(c(i,i) c(j,j)). Throws
/// UndefinedItemError when either item has no plays.
double item_similarity(const CoPlayModel& model, EntityId i, EntityId j);

struct ScoredEntity {
    EntityId entity;
    double score = 0.0;
};

/// Top-k available co-played videos, anchor excluded, ordered by
/// (similarity desc, popularity desc, id asc).
std::vector<ScoredEntity> similar_videos(const CoPlayModel& model, EntityId anchor, std::size_t k,
                                        const Catalog& catalog);

/// normalized query -> (entity -> number of selections)
class QueryAssociationModel {
public:
    QueryAssociationModel() = default;

    static QueryAssociationModel build(const InteractionLog& log);

    /// Raw selection counts for an already-normalized query, sorted by id.
    std::span<const std::pair<EntityId, std::uint32_t>> counts(std::string_view normalized_query) const;

    std::size_t query_count() const noexcept { return table_.size(); }

private:
    std::unordered_map<std::string, std::vector<std::pair<EntityId, std::uint32_t>>> table_;
};

/// Counts for normalize(query) scaled so the largest is 1; sorted by
/// (score desc, id asc). Unknown query yields [].
std::vector<ScoredEntity> query_associations(const QueryAssociationModel& model, std::string_view query);

struct ContextAnchor {
    EntityId entity;
    double weight = 1.0;
};

struct SearchRecommendation {
    EntityId video;
    double association_score = 0.0;
    std::vector<EntityId> anchors;  // contributing context anchors, ascending
};

/// Videos related to the query context. Talent anchors expand uniformly over
/// their credits and collections over their members; each expanded item
/// contributes weight * share * sim(item, v), where an item is fully similar
/// to itself. The result score is max(collaborative evidence, query
/// association), clipped to [0,1]. Only available videos are returned.
std::vector<SearchRecommendation> recommend_for_context(std::span<const ContextAnchor> anchors,
                                                        std::string_view query,
                                                        const CoPlayModel& coplay,
                                                        const QueryAssociationModel& associations,
                                                        const Catalog& catalog, std::size_t k);

}  // namespace shelf
