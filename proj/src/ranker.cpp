#include "shelf/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "shelf/text.hpp"

namespace shelf {

using nlohmann::json;

RelevanceModel default_relevance_model() {
    RelevanceModel m;
    at(m.weights, Feature::LexicalScore) = 4.0;
    at(m.weights, Feature::FullMatch) = 1.0;
    at(m.weights, Feature::AssociationScore) = 3.0;
    at(m.weights, Feature::Popularity) = 1.0;
    at(m.weights, Feature::FacetAlignment) = 1.0;
    at(m.weights, Feature::IsMatch) = 0.5;
    m.bias = -3.0;
    return m;
}

json to_json(const RelevanceModel& model) {
    return json{{"weights", model.weights}, {"bias", model.bias}, {"schema_version", kFeatureSchemaVersion}};
}

RelevanceModel relevance_model_from_json(const json& j) {
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kFeatureSchemaVersion) {
            throw ValidationError("unsupported feature schema version " + std::to_string(version));
        }
        const auto weights = j.at("weights").get<std::vector<double>>();
        if (weights.size() != kFeatureCount) {
            throw ValidationError("expected " + std::to_string(kFeatureCount) + " weights, got " +
                                  std::to_string(weights.size()));
        }
        RelevanceModel m;
        std::copy(weights.begin(), weights.end(), m.weights.begin());
        m.bias = j.at("bias").get<double>();
        for (double w : m.weights) {
            if (!std::isfinite(w)) throw ValidationError("non-finite weight");
        }
        if (!std::isfinite(m.bias)) throw ValidationError("non-finite bias");
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("relevance model: ") + e.what());
    }
}

RelevanceModel load_relevance_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    try {
        return relevance_model_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void save_relevance_model(const RelevanceModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file '" + path + "'");
    out << to_json(model).dump(2) << '\n';
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::Match:
            return "match";
        case Provenance::Recommendation:
            return "recommendation";
        case Provenance::Both:
            return "both";
    }
    return "";
}

Provenance parse_provenance(std::string_view name) {
    if (name == "match") return Provenance::Match;
    if (name == "recommendation") return Provenance::Recommendation;
    if (name == "both") return Provenance::Both;
    throw ValidationError("unknown provenance '" + std::string(name) + "'");
}

bool aligned_with_anchor(const Catalog& catalog, EntityId video, std::optional<EntityId> anchor) {
    if (!anchor) return false;
    if (*anchor == video) return true;
    if (const Talent* t = catalog.find_talent(*anchor)) {
        return std::find(t->credits.begin(), t->credits.end(), video) != t->credits.end();
    }
    if (const Collection* c = catalog.find_collection(*anchor)) {
        return std::find(c->members.begin(), c->members.end(), video) != c->members.end();
    }
    return false;
}

namespace {

FeatureVector make_features(EntityId video, const SearchMatch* match, const SearchRecommendation* rec,
                            const FacetEstimate& facets, double query_length_norm,
                            const Catalog& catalog) {
    FeatureVector f{};
    if (match) {
        at(f, Feature::LexicalScore) = match->lexical_score;
        at(f, Feature::FullMatch) = match->full_match ? 1.0 : 0.0;
        at(f, Feature::IsMatch) = 1.0;
    }
    if (rec) {
        at(f, Feature::AssociationScore) = rec->association_score;
        at(f, Feature::IsRecommendation) = 1.0;
    }
    at(f, Feature::Popularity) = catalog.popularity(video);
    at(f, Feature::FacetAlignment) =
        aligned_with_anchor(catalog, video, facets.anchor(facets.argmax())) ? 1.0 : 0.0;
    at(f, Feature::QueryLength) = query_length_norm;
    return f;
}

double query_length_norm(std::string_view query) {
    return static_cast<double>(std::min<std::size_t>(char_count(normalize(query)), 20)) / 20.0;
}

}  // namespace

FeatureVector extract_features(EntityId video, std::span<const SearchMatch> matches,
                               std::span<const SearchRecommendation> recs, const FacetEstimate& facets,
                               std::string_view query, const Catalog& catalog) {
    const SearchMatch* match = nullptr;
    for (const auto& m : matches) {
        if (m.entity == video) {
            match = &m;
            break;
        }
    }
    const SearchRecommendation* rec = nullptr;
    for (const auto& r : recs) {
        if (r.video == video) {
            rec = &r;
            break;
        }
    }
    if (!match && !rec) {
        throw std::invalid_argument("video " + to_string(video) + " is neither a match nor a recommendation");
    }
    return make_features(video, match, rec, facets, query_length_norm(query), catalog);
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double score(const RelevanceModel& model, const FeatureVector& features) {
    double z = model.bias;
    for (std::size_t i = 0; i < kFeatureCount; ++i) z += model.weights[i] * features[i];
    return sigmoid(z);
}

namespace {

double logit(const RelevanceModel& model, const FeatureVector& features) {
    double z = model.bias;
    for (std::size_t i = 0; i < kFeatureCount; ++i) z += model.weights[i] * features[i];
    return z;
}

// -log p(y | z) for the logistic model, stable for large |z|.
double log_loss(double z, int label) {
    const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    return softplus - (label == 1 ? z : 0.0);
}

}  // namespace

LossGradient loss_and_gradient(const RelevanceModel& model, std::span<const TrainingExample> examples,
                               double l2) {
    LossGradient out;
    if (examples.empty()) return out;
    const double n = static_cast<double>(examples.size());
    for (const auto& ex : examples) {
        const double z = logit(model, ex.features);
        out.loss += log_loss(z, ex.label);
        const double residual = sigmoid(z) - static_cast<double>(ex.label);
        for (std::size_t i = 0; i < kFeatureCount; ++i) out.weights[i] += residual * ex.features[i];
        out.bias += residual;
    }
    out.loss /= n;
    out.bias /= n;
    double norm = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        out.weights[i] = out.weights[i] / n + l2 * model.weights[i];
        norm += model.weights[i] * model.weights[i];
    }
    out.loss += 0.5 * l2 * norm;
    return out;
}

TrainResult train(std::span<const TrainingExample> examples, const TrainConfig& config) {
    bool has_positive = false, has_negative = false;
    for (const auto& ex : examples) {
        if (ex.label != 0 && ex.label != 1) throw std::invalid_argument("labels must be 0 or 1");
        (ex.label == 1 ? has_positive : has_negative) = true;
    }
    if (!has_positive || !has_negative) {
        throw std::invalid_argument("training needs at least one example of each label");
    }
    if (config.epochs < 0) throw std::invalid_argument("epochs must be >= 0");

    TrainResult result;
    auto step = loss_and_gradient(result.model, examples, config.l2);
    result.loss_history.push_back(step.loss);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            result.model.weights[i] -= config.learning_rate * step.weights[i];
        }
        result.model.bias -= config.learning_rate * step.bias;
        step = loss_and_gradient(result.model, examples, config.l2);
        result.loss_history.push_back(step.loss);
    }
    result.loss = step.loss;
    return result;
}

LabeledExamples label_from_logs(const InteractionLog& log, const ReplayFn& replay) {
    LabeledExamples out;
    for (const auto& event : log.searches) {
        const auto shown = replay(event);
        auto clicked = std::find_if(shown.begin(), shown.end(),
                                    [&](const ScoredResult& r) { return r.video == event.selected; });
        if (clicked == shown.end()) {
            ++out.skipped;
            continue;
        }
        const auto click_pos = static_cast<std::size_t>(clicked - shown.begin());
        const std::size_t last = std::min(shown.size() - 1, click_pos + 2);
        for (std::size_t pos = 0; pos <= last; ++pos) {
            const int label = pos == click_pos ? 1 : 0;
            out.examples.push_back({shown[pos].features, label});
            (label ? out.positives : out.negatives) += 1;
        }
    }
    return out;
}

std::vector<ScoredResult> blend_and_rank(std::span<const SearchMatch> matches,
                                         std::span<const SearchRecommendation> recs,
                                         const RelevanceModel& model, const FacetEstimate& facets,
                                         std::string_view query, const Catalog& catalog, std::size_t k) {
    std::map<EntityId, std::pair<const SearchMatch*, const SearchRecommendation*>> pool;
    auto playable = [&](EntityId id) {
        const Video* v = catalog.find_video(id);
        return v && v->available;
    };
    for (const auto& m : matches) {
        if (playable(m.entity) && !pool[m.entity].first) pool[m.entity].first = &m;
    }
    for (const auto& r : recs) {
        if (playable(r.video) && !pool[r.video].second) pool[r.video].second = &r;
    }

    const double qlen = query_length_norm(query);
    std::vector<ScoredResult> ranked;
    ranked.reserve(pool.size());
    for (const auto& [video, sources] : pool) {
        const auto [match, rec] = sources;
        ScoredResult r;
        r.video = video;
        r.provenance = match && rec ? Provenance::Both : (match ? Provenance::Match : Provenance::Recommendation);
        r.features = make_features(video, match, rec, facets, qlen, catalog);
        r.score = score(model, r.features);
        r.full_match = match && match->full_match;
        if (rec) r.recommendation_anchors = rec->anchors;
        ranked.push_back(std::move(r));
    }
    std::sort(ranked.begin(), ranked.end(), [&](const ScoredResult& a, const ScoredResult& b) {
        if (a.score != b.score) return a.score > b.score;
        const double pa = catalog.popularity(a.video), pb = catalog.popularity(b.video);
        if (pa != pb) return pa > pb;
        return a.video < b.video;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

}  // namespace shelf
