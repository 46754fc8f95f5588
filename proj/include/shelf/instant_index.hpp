#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "shelf/catalog.hpp"

namespace shelf {

/// A keyword match of the query against one indexed entity.
struct SearchMatch {
    EntityId entity;
    double lexical_score = 0.0;
    bool full_match = false;
    std::size_t matched_tokens = 0;
};

struct MatchParams {
    /// Score multiplier for matches whose final (still being typed) token
    /// matches nothing. Tunable.
    double partial_penalty = 0.5;
};

/// One indexed name (title, alias, talent name or collection label).
struct IndexedName {
    std::string normalized;
    std::vector<std::string> tokens;
    std::size_t token_chars = 0;  // sum of token lengths in code points
};

/// Best-scoring interpretation of a tokenized query against a single name,
/// or nullopt when the name neither fully nor partially matches.
std::optional<SearchMatch> score_name(std::span<const std::string> query_tokens,
                                      std::string_view normalized_query, const IndexedName& name,
                                      const MatchParams& params = {});

IndexedName make_indexed_name(std::string_view raw);

/// Every name an entity is searchable under, title first.
std::vector<std::string> searchable_names(const Catalog& catalog, EntityId id);

/// Prefix-to-postings map over every token of every entity name. Immutable
/// after build.
class InstantIndex {
public:
    struct Posting {
        EntityId entity;
        std::uint32_t position;  // token position across the entity's names

        friend bool operator==(const Posting&, const Posting&) = default;
    };

    InstantIndex() = default;

    static InstantIndex build(const Catalog& catalog, MatchParams params = {});

    /// Sorted (score desc, popularity desc, id asc). Empty query yields [].
    std::vector<SearchMatch> match_prefix(std::string_view query) const;

    /// Postings for a normalized token prefix, sorted by entity id.
    std::span<const Posting> postings(std::string_view prefix) const;

    std::size_t entity_count() const noexcept { return entities_.size(); }
    std::size_t prefix_count() const noexcept { return postings_.size(); }
    std::size_t posting_count() const noexcept;
    bool empty() const noexcept { return entities_.empty(); }

private:
    struct Entry {
        EntityId id;
        double popularity = 0.0;
        std::vector<IndexedName> names;
    };

    const Entry* entry(EntityId id) const;

    MatchParams params_;
    std::vector<Entry> entries_;
    std::unordered_map<EntityId, std::size_t> entities_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

inline InstantIndex build_index(const Catalog& catalog) { return InstantIndex::build(catalog); }

inline std::vector<SearchMatch> match_prefix(const InstantIndex& index, std::string_view query) {
    return index.match_prefix(query);
}

}  // namespace shelf
