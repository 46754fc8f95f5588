#include "shelf/facet.hpp"

#include <algorithm>
#include <map>

#include "shelf/text.hpp"

namespace shelf {

std::string_view to_string(Facet facet) {
    switch (facet) {
        case Facet::AvailableVideo:
            return "AvailableVideo";
        case Facet::UnavailableVideo:
            return "UnavailableVideo";
        case Facet::Talent:
            return "Talent";
        case Facet::Collection:
            return "Collection";
    }
    return "";
}

std::optional<Facet> parse_facet(std::string_view name) {
    for (Facet f : kAllFacets) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

std::optional<Facet> facet_of(const Catalog& catalog, EntityId id) {
    const auto kind = catalog.kind_of(id);
    if (!kind) return std::nullopt;
    switch (*kind) {
        case EntityKind::Video:
            return catalog.find_video(id)->available ? Facet::AvailableVideo : Facet::UnavailableVideo;
        case EntityKind::Talent:
            return Facet::Talent;
        case EntityKind::Collection:
            return Facet::Collection;
    }
    return std::nullopt;
}

Facet FacetEstimate::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kFacetCount; ++i) {
        if (distribution[i] > distribution[best]) best = i;
    }
    return kAllFacets[best];
}

FacetArray facet_distribution(const FacetArray& evidence) {
    double total = 0.0;
    for (double e : evidence) total += std::max(0.0, e);
    FacetArray out{};
    if (total <= 0.0) {
        out.fill(1.0 / static_cast<double>(kFacetCount));
        return out;
    }
    for (std::size_t i = 0; i < kFacetCount; ++i) out[i] = std::max(0.0, evidence[i]) / total;
    return out;
}

FacetEstimate detect_facet(std::string_view query, std::span<const SearchMatch> matches,
                           const QueryAssociationModel& associations, const Catalog& catalog,
                           const FacetWeights& weights) {
    std::map<EntityId, std::pair<double, double>> per_entity;  // (lexical, count)
    for (const auto& m : matches) {
        auto& slot = per_entity[m.entity];
        slot.first = std::max(slot.first, m.lexical_score);
    }
    FacetArray mass{};
    for (const auto& [id, count] : associations.counts(normalize(query))) {
        const auto f = facet_of(catalog, id);
        if (!f) continue;
        per_entity[id].second += count;
        mass[static_cast<std::size_t>(*f)] += count;
    }
    const double top_mass = *std::max_element(mass.begin(), mass.end());

    FacetArray lexical{};
    FacetArray evidence{};
    std::array<std::optional<std::pair<EntityId, double>>, kFacetCount> best{};
    for (const auto& [id, signal] : per_entity) {
        const auto f = facet_of(catalog, id);
        if (!f) continue;
        const auto idx = static_cast<std::size_t>(*f);
        lexical[idx] = std::max(lexical[idx], signal.first);
        const double behavioral = top_mass > 0.0 ? signal.second / top_mass : 0.0;
        const double score = weights.lexical * signal.first + weights.behavioral * behavioral;
        if (score <= 0.0) continue;
        auto& current = best[idx];
        if (!current || score > current->second ||
            (score == current->second &&
             (catalog.popularity(id) > catalog.popularity(current->first) ||
              (catalog.popularity(id) == catalog.popularity(current->first) && id < current->first)))) {
            current = std::pair{id, score};
        }
    }
    for (std::size_t i = 0; i < kFacetCount; ++i) {
        const double behavioral = top_mass > 0.0 ? mass[i] / top_mass : 0.0;
        evidence[i] = weights.lexical * lexical[i] + weights.behavioral * behavioral;
    }

    FacetEstimate estimate;
    estimate.distribution = facet_distribution(evidence);
    for (std::size_t i = 0; i < kFacetCount; ++i) {
        if (best[i]) estimate.anchors[i] = best[i]->first;
    }
    estimate.specificity = estimate_specificity(query, matches);
    return estimate;
}

double estimate_specificity(std::string_view query, std::span<const SearchMatch> matches) {
    const double length = static_cast<double>(std::min<std::size_t>(char_count(normalize(query)), 12));
    double margin = 0.0;
    if (!matches.empty()) {
        double top = 0.0, second = 0.0;
        for (const auto& m : matches) {
            if (m.lexical_score > top) {
                second = top;
                top = m.lexical_score;
            } else if (m.lexical_score > second) {
                second = m.lexical_score;
            }
        }
        margin = top - second;
    }
    return std::clamp(0.5 * length / 12.0 + 0.5 * margin, 0.0, 1.0);
}

IntentEstimate estimate_intent(const FacetEstimate& facets) {
    return IntentEstimate{std::clamp(facets.specificity, 0.0, 1.0)};
}

}  // namespace shelf
