#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shelf/catalog.hpp"
#include "shelf/facet.hpp"
#include "shelf/ranker.hpp"

namespace shelf {

enum class GroupKind { ExactMatch, SimilarToAnchor, TagRow, TalentCredits, CollectionMembers, FansOfUnavailable };

std::string_view to_string(GroupKind kind);
std::optional<GroupKind> parse_group_kind(std::string_view name);

/// Groups built around the facet anchor; boosted for specific queries.
bool is_anchor_kind(GroupKind kind);

/// Editorial rule for forming one kind of row. A TagRow without `tag` yields
/// one candidate per qualifying tag.
struct GroupDefinition {
    std::string id;
    GroupKind kind = GroupKind::TagRow;
    std::optional<std::string> tag;
    std::string label_template;
    std::size_t min_size = 3;
    std::size_t max_size = 20;
    double priority = 1.0;
    std::vector<Facet> applicable_facets;
};

struct RankParams {
    std::size_t max_groups = 10;
    double lambda_div = 0.5;
    double specificity = 0.0;
    double tau_narrow = 0.6;
    double boost = 1.5;
};

struct EditorialConfig {
    std::vector<GroupDefinition> definitions;
    RankParams params;
    std::size_t max_pills = 5;
};

/// Substitutes {anchor} and {tag}. Throws ValidationError on any other
/// placeholder or an unbalanced brace.
std::string render_label(std::string_view label_template, std::string_view anchor, std::string_view tag);

void validate(const GroupDefinition& def);

/// Accepts either a bare JSON list of definitions or an object
/// {"params": {...}, "max_pills": n, "groups": [...]}.
EditorialConfig editorial_config_from_json(const nlohmann::json& j);
EditorialConfig load_editorial_config(std::istream& in);
EditorialConfig load_editorial_config_file(const std::string& path);
nlohmann::json to_json(const GroupDefinition& def);

EditorialConfig default_editorial_config();

struct GroupEvidence {
    std::string definition;
    std::optional<EntityId> anchor;

    friend bool operator==(const GroupEvidence&, const GroupEvidence&) = default;
};

/// A candidate row before greedy page construction.
struct CandidateGroup {
    std::string header;
    std::vector<EntityId> members;  // ranked order, at most max_size
    GroupEvidence evidence;
    GroupKind kind = GroupKind::TagRow;
    double priority = 1.0;
    std::size_t min_size = 1;
    std::size_t max_size = 20;
};

struct ResultGroup {
    std::string header;
    std::vector<EntityId> videos;
    GroupEvidence evidence;

    friend bool operator==(const ResultGroup&, const ResultGroup&) = default;
};

struct SearchPage {
    std::vector<ResultGroup> groups;
    std::vector<std::string> pills;
    FacetEstimate facets;
    IntentEstimate intent;
};

std::vector<CandidateGroup> generate_candidates(std::span<const ScoredResult> ranked, const FacetEstimate& facets,
                                                const Catalog& catalog,
                                                std::span<const GroupDefinition> definitions);

/// Greedy page construction. Each round takes the candidate maximizing
///   priority * (sum of member scores) * (1 - lambda_div * max Jaccard of its
///   original members against any selected group's original members),
/// times `boost` for anchor kinds when specificity >= tau_narrow and for tag
/// rows otherwise. Selected members are then removed from every remaining
/// candidate and candidates below min_size are dropped.
std::vector<ResultGroup> rank_groups(std::span<const CandidateGroup> candidates,
                                     std::span<const ScoredResult> ranked, const RankParams& params);

/// Anchor tags ordered by how many ranked available videos share them, then
/// by label. Throws NotFoundError / ValidationError for a non-video anchor.
std::vector<std::string> make_pills(EntityId anchor, const Catalog& catalog, std::span<const ScoredResult> ranked,
                                    std::size_t max_pills);

/// Pills are attached only for UnavailableVideo queries; clashing headers
/// get a " · n" suffix.
SearchPage compose_page(std::vector<ResultGroup> groups, const FacetEstimate& facets, const IntentEstimate& intent,
                        std::vector<std::string> pills);

}  // namespace shelf
