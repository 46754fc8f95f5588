#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shelf/behavior.hpp"
#include "shelf/facet.hpp"
#include "shelf/instant_index.hpp"

namespace shelf {

enum class Feature : std::size_t {
    LexicalScore,
    FullMatch,
    AssociationScore,
    Popularity,
    FacetAlignment,
    IsMatch,
    IsRecommendation,
    QueryLength,
};

inline constexpr std::size_t kFeatureCount = 8;
inline constexpr int kFeatureSchemaVersion = 1;

using FeatureVector = std::array<double, kFeatureCount>;

inline double& at(FeatureVector& f, Feature which) { return f[static_cast<std::size_t>(which)]; }
inline double at(const FeatureVector& f, Feature which) { return f[static_cast<std::size_t>(which)]; }

struct RelevanceModel {
    std::array<double, kFeatureCount> weights{};
    double bias = 0.0;
};

/// Hand-set weights used until a trained model is supplied.
RelevanceModel default_relevance_model();

nlohmann::json to_json(const RelevanceModel& model);
/// Throws ValidationError on wrong arity, non-finite values or schema mismatch.
RelevanceModel relevance_model_from_json(const nlohmann::json& j);
RelevanceModel load_relevance_model(const std::string& path);
void save_relevance_model(const RelevanceModel& model, const std::string& path);

enum class Provenance { Match, Recommendation, Both };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view name);

struct ScoredResult {
    EntityId video;
    Provenance provenance = Provenance::Match;
    FeatureVector features{};
    double score = 0.0;
    bool full_match = false;
    std::vector<EntityId> recommendation_anchors;
};

/// True when `video` is the anchor or is credited/membered by it.
bool aligned_with_anchor(const Catalog& catalog, EntityId video, std::optional<EntityId> anchor);

/// Throws std::invalid_argument when the video appears in neither source.
FeatureVector extract_features(EntityId video, std::span<const SearchMatch> matches,
                               std::span<const SearchRecommendation> recs, const FacetEstimate& facets,
                               std::string_view query, const Catalog& catalog);

double sigmoid(double z);

/// sigmoid(bias + weights . features)
double score(const RelevanceModel& model, const FeatureVector& features);

struct TrainingExample {
    FeatureVector features{};
    int label = 0;
};

struct TrainConfig {
    double learning_rate = 0.5;
    int epochs = 500;
    double l2 = 1e-4;
};

struct LossGradient {
    double loss = 0.0;
    std::array<double, kFeatureCount> weights{};
    double bias = 0.0;
};

/// Mean log-loss plus (l2 / 2) * |weights|^2 (bias unregularized) and its
/// analytic gradient.
LossGradient loss_and_gradient(const RelevanceModel& model, std::span<const TrainingExample> examples,
                               double l2);

struct TrainResult {
    RelevanceModel model;
    double loss = 0.0;
    std::vector<double> loss_history;  // [0] is the initial loss, one entry per epoch after
};

/// Full-batch gradient descent from zero weights. Throws std::invalid_argument
/// unless both labels are present.
TrainResult train(std::span<const TrainingExample> examples, const TrainConfig& config);

struct LabeledExamples {
    std::vector<TrainingExample> examples;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t skipped = 0;
};

/// Reconstructs the results shown for a logged search.
using ReplayFn = std::function<std::vector<ScoredResult>(const SearchEvent&)>;

/// Clicked result gets label 1; every other result at a replayed position
/// <= click position + 2 gets label 0. Searches whose selection is not
/// among the replayed results are skipped and counted.
LabeledExamples label_from_logs(const InteractionLog& log, const ReplayFn& replay);

/// Union of matches and recommendations by video (talent, collection and
/// unavailable entries dropped), scored and sorted by (score desc,
/// popularity desc, id asc), truncated to k.
std::vector<ScoredResult> blend_and_rank(std::span<const SearchMatch> matches,
                                         std::span<const SearchRecommendation> recs,
                                         const RelevanceModel& model, const FacetEstimate& facets,
                                         std::string_view query, const Catalog& catalog, std::size_t k);

}  // namespace shelf
