#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "shelf/behavior.hpp"
#include "shelf/catalog.hpp"
#include "shelf/instant_index.hpp"

namespace shelf {

enum class Facet : std::size_t { AvailableVideo = 0, UnavailableVideo = 1, Talent = 2, Collection = 3 };

inline constexpr std::size_t kFacetCount = 4;
inline constexpr std::array<Facet, kFacetCount> kAllFacets = {
    Facet::AvailableVideo, Facet::UnavailableVideo, Facet::Talent, Facet::Collection};

std::string_view to_string(Facet facet);
std::optional<Facet> parse_facet(std::string_view name);

/// Facet class of a catalog entity; nullopt for unknown ids.
std::optional<Facet> facet_of(const Catalog& catalog, EntityId id);

using FacetArray = std::array<double, kFacetCount>;

struct FacetEstimate {
    FacetArray distribution{0.25, 0.25, 0.25, 0.25};
    std::array<std::optional<EntityId>, kFacetCount> anchors{};
    double specificity = 0.0;

    double probability(Facet f) const { return distribution[static_cast<std::size_t>(f)]; }
    std::optional<EntityId> anchor(Facet f) const { return anchors[static_cast<std::size_t>(f)]; }
    /// Highest-probability facet; ties resolve in enumeration order.
    Facet argmax() const;
};

struct IntentEstimate {
    double fetch_probability = 0.0;
};

struct FacetWeights {
    double lexical = 0.5;
    double behavioral = 0.5;
};

/// Evidence normalized to a distribution; uniform when all evidence is zero.
FacetArray facet_distribution(const FacetArray& evidence);

/// Per facet: weights.lexical * best lexical score of that class plus
/// weights.behavioral * the class's share of query-association counts
/// (scaled so the heaviest class is 1).
FacetEstimate detect_facet(std::string_view query, std::span<const SearchMatch> matches,
                           const QueryAssociationModel& associations, const Catalog& catalog,
                           const FacetWeights& weights = {});

double estimate_specificity(std::string_view query, std::span<const SearchMatch> matches);

/// Fetch probability is the specificity itself; a proxy used only to choose
/// between broad and narrow organization.
IntentEstimate estimate_intent(const FacetEstimate& facets);

}  // namespace shelf
