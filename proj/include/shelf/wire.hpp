#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shelf/facet.hpp"
#include "shelf/ranker.hpp"

namespace shelf {

struct WireVideo {
    EntityId id;
    std::string title;
    bool available = true;
    double score = 0.0;
    Provenance provenance = Provenance::Match;

    friend bool operator==(const WireVideo&, const WireVideo&) = default;
};

struct WireGroup {
    std::string header;
    std::string definition;
    std::optional<EntityId> anchor;
    std::vector<WireVideo> videos;

    friend bool operator==(const WireGroup&, const WireGroup&) = default;
};

/// Body of GET /search.
struct SearchResponse {
    std::string query;
    FacetArray distribution{};
    double specificity = 0.0;
    double fetch_probability = 0.0;
    std::vector<WireGroup> groups;
    std::vector<std::string> pills;
    double timing_ms = 0.0;
    std::uint64_t snapshot = 0;

    friend bool operator==(const SearchResponse&, const SearchResponse&) = default;
};

nlohmann::json to_json(const SearchResponse& response);
/// Throws ValidationError when the document does not follow the schema.
SearchResponse search_response_from_json(const nlohmann::json& j);

/// Serialized body with `timing_ms` removed, for determinism checks.
std::string body_without_timing(const SearchResponse& response);

}  // namespace shelf
