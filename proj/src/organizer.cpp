#include "shelf/organizer.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace shelf {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<GroupKind, std::string_view>, 6> kKindNames = {{
    {GroupKind::ExactMatch, "ExactMatch"},
    {GroupKind::SimilarToAnchor, "SimilarToAnchor"},
    {GroupKind::TagRow, "TagRow"},
    {GroupKind::TalentCredits, "TalentCredits"},
    {GroupKind::CollectionMembers, "CollectionMembers"},
    {GroupKind::FansOfUnavailable, "FansOfUnavailable"},
}};

}  // namespace

std::string_view to_string(GroupKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "";
}

std::optional<GroupKind> parse_group_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

bool is_anchor_kind(GroupKind kind) { return kind != GroupKind::TagRow; }

std::string render_label(std::string_view label_template, std::string_view anchor, std::string_view tag) {
    std::string out;
    std::size_t pos = 0;
    while (pos < label_template.size()) {
        const char c = label_template[pos];
        if (c == '}') throw ValidationError("unbalanced '}' in label template '" + std::string(label_template) + "'");
        if (c != '{') {
            out.push_back(c);
            ++pos;
            continue;
        }
        const auto close = label_template.find('}', pos);
        if (close == std::string_view::npos) {
            throw ValidationError("unterminated placeholder in label template '" + std::string(label_template) + "'");
        }
        const auto name = label_template.substr(pos + 1, close - pos - 1);
        if (name == "anchor") {
            out.append(anchor);
        } else if (name == "tag") {
            out.append(tag);
        } else {
            throw ValidationError("unknown placeholder '{" + std::string(name) + "}' in label template");
        }
        pos = close + 1;
    }
    return out;
}

void validate(const GroupDefinition& def) {
    if (def.id.empty()) throw ValidationError("group definition without id");
    const std::string where = "group definition '" + def.id + "': ";
    if (def.min_size < 1) throw ValidationError(where + "min_size must be >= 1");
    if (def.min_size > def.max_size) throw ValidationError(where + "min_size exceeds max_size");
    if (!(def.priority > 0.0 && def.priority <= 1.0)) throw ValidationError(where + "priority must lie in (0,1]");
    if (def.applicable_facets.empty()) throw ValidationError(where + "no applicable facets");
    if (def.tag && def.kind != GroupKind::TagRow) throw ValidationError(where + "'tag' is only valid for TagRow");
    try {
        if (render_label(def.label_template, "x", "x").empty()) {
            throw ValidationError(where + "label renders empty");
        }
    } catch (const ValidationError& e) {
        throw ValidationError(where + e.what());
    }
}

namespace {

GroupDefinition definition_from_json(const json& j) {
    GroupDefinition def;
    def.id = j.at("id").get<std::string>();
    const auto kind_name = j.at("kind").get<std::string>();
    const auto kind = parse_group_kind(kind_name);
    if (!kind) throw ValidationError("group definition '" + def.id + "': unknown kind '" + kind_name + "'");
    def.kind = *kind;
    if (j.contains("tag") && !j.at("tag").is_null()) def.tag = j.at("tag").get<std::string>();
    def.label_template = j.at("label_template").get<std::string>();
    def.min_size = j.value("min_size", def.kind == GroupKind::ExactMatch ? std::size_t{1} : std::size_t{3});
    def.max_size = j.value("max_size", std::size_t{20});
    def.priority = j.value("priority", 1.0);
    if (j.contains("applicable_facets")) {
        for (const auto& f : j.at("applicable_facets")) {
            const auto name = f.get<std::string>();
            const auto facet = parse_facet(name);
            if (!facet) throw ValidationError("group definition '" + def.id + "': unknown facet '" + name + "'");
            def.applicable_facets.push_back(*facet);
        }
    } else {
        def.applicable_facets.assign(kAllFacets.begin(), kAllFacets.end());
    }
    validate(def);
    return def;
}

}  // namespace

EditorialConfig editorial_config_from_json(const json& j) {
    EditorialConfig config;
    try {
        const json* groups = &j;
        if (j.is_object()) {
            groups = &j.at("groups");
            if (j.contains("params")) {
                const auto& p = j.at("params");
                config.params.max_groups = p.value("max_groups", config.params.max_groups);
                config.params.lambda_div = p.value("lambda_div", config.params.lambda_div);
                config.params.tau_narrow = p.value("tau_narrow", config.params.tau_narrow);
                config.params.boost = p.value("boost", config.params.boost);
            }
            config.max_pills = j.value("max_pills", config.max_pills);
        }
        if (!groups->is_array()) throw ValidationError("group definitions must be a JSON list");
        std::set<std::string> ids;
        for (const auto& item : *groups) {
            auto def = definition_from_json(item);
            if (!ids.insert(def.id).second) throw ValidationError("duplicate group definition id '" + def.id + "'");
            config.definitions.push_back(std::move(def));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("group definitions: ") + e.what());
    }
    if (config.params.max_groups < 1) throw ValidationError("max_groups must be >= 1");
    if (!(config.params.lambda_div >= 0.0 && config.params.lambda_div <= 1.0)) {
        throw ValidationError("lambda_div must lie in [0,1]");
    }
    return config;
}

EditorialConfig load_editorial_config(std::istream& in) {
    try {
        return editorial_config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("group definitions: ") + e.what());
    }
}

EditorialConfig load_editorial_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open group definition file '" + path + "'");
    return load_editorial_config(in);
}

json to_json(const GroupDefinition& def) {
    json facets = json::array();
    for (Facet f : def.applicable_facets) facets.push_back(std::string(to_string(f)));
    json j{{"id", def.id},
           {"kind", std::string(to_string(def.kind))},
           {"label_template", def.label_template},
           {"min_size", def.min_size},
           {"max_size", def.max_size},
           {"priority", def.priority},
           {"applicable_facets", facets}};
    if (def.tag) j["tag"] = *def.tag;
    return j;
}

EditorialConfig default_editorial_config() {
    using enum Facet;
    EditorialConfig config;
    config.definitions = {
        {"exact_match", GroupKind::ExactMatch, std::nullopt, "Top Results", 1, 20, 1.0,
         {AvailableVideo, UnavailableVideo, Talent, Collection}},
        {"fans_of_unavailable", GroupKind::FansOfUnavailable, std::nullopt, "Fans of '{anchor}' have watched these", 3,
         20, 1.0, {UnavailableVideo}},
        {"similar_to_anchor", GroupKind::SimilarToAnchor, std::nullopt, "More Like '{anchor}'", 3, 20, 0.8,
         {AvailableVideo}},
        {"talent_credits", GroupKind::TalentCredits, std::nullopt, "Starring {anchor}", 3, 20, 1.0, {Talent}},
        {"collection_members", GroupKind::CollectionMembers, std::nullopt, "{anchor}", 3, 20, 1.0, {Collection}},
        {"tag_rows", GroupKind::TagRow, std::nullopt, "{tag}", 3, 20, 0.5,
         {AvailableVideo, UnavailableVideo, Talent, Collection}},
    };
    return config;
}

std::vector<CandidateGroup> generate_candidates(std::span<const ScoredResult> ranked, const FacetEstimate& facets,
                                                const Catalog& catalog,
                                                std::span<const GroupDefinition> definitions) {
    std::vector<CandidateGroup> out;
    if (ranked.empty()) return out;

    const Facet facet = facets.argmax();
    const std::optional<EntityId> anchor = facets.anchor(facet);
    const std::string anchor_name = anchor ? catalog.display_name(*anchor) : std::string();

    auto emit = [&](const GroupDefinition& def, std::vector<EntityId> members, std::string header,
                    std::optional<EntityId> evidence_anchor) {
        if (members.size() > def.max_size) members.resize(def.max_size);
        if (members.size() < def.min_size) return;
        out.push_back(CandidateGroup{std::move(header), std::move(members), {def.id, evidence_anchor}, def.kind,
                                     def.priority, def.min_size, def.max_size});
    };
    auto select = [&](auto&& keep) {
        std::vector<EntityId> members;
        for (const auto& r : ranked) {
            if (keep(r)) members.push_back(r.video);
        }
        return members;
    };

    for (const auto& def : definitions) {
        if (std::find(def.applicable_facets.begin(), def.applicable_facets.end(), facet) ==
            def.applicable_facets.end()) {
            continue;
        }
        switch (def.kind) {
            case GroupKind::ExactMatch:
                emit(def, select([](const ScoredResult& r) { return r.full_match; }),
                     render_label(def.label_template, anchor_name, ""), anchor);
                break;
            case GroupKind::TagRow: {
                std::vector<std::string> tags;
                if (def.tag) {
                    tags.push_back(*def.tag);
                } else {
                    std::set<std::string> seen;
                    for (const auto& r : ranked) {
                        if (const Video* v = catalog.find_video(r.video)) seen.insert(v->tags.begin(), v->tags.end());
                    }
                    tags.assign(seen.begin(), seen.end());
                }
                for (const auto& tag : tags) {
                    emit(def, select([&](const ScoredResult& r) {
                             const Video* v = catalog.find_video(r.video);
                             return v && v->has_tag(tag);
                         }),
                         render_label(def.label_template, anchor_name, tag), std::nullopt);
                }
                break;
            }
            case GroupKind::SimilarToAnchor:
            case GroupKind::FansOfUnavailable: {
                if (!anchor) break;
                if (def.kind == GroupKind::FansOfUnavailable) {
                    const Video* v = catalog.find_video(*anchor);
                    if (!v || v->available) break;
                }
                emit(def, select([&](const ScoredResult& r) {
                         return r.video != *anchor &&
                                std::binary_search(r.recommendation_anchors.begin(), r.recommendation_anchors.end(),
                                                   *anchor);
                     }),
                     render_label(def.label_template, anchor_name, ""), anchor);
                break;
            }
            case GroupKind::TalentCredits: {
                const Talent* t = anchor ? catalog.find_talent(*anchor) : nullptr;
                if (!t) break;
                std::unordered_set<EntityId> credits(t->credits.begin(), t->credits.end());
                emit(def, select([&](const ScoredResult& r) { return credits.contains(r.video); }),
                     render_label(def.label_template, anchor_name, ""), anchor);
                break;
            }
            case GroupKind::CollectionMembers: {
                const Collection* c = anchor ? catalog.find_collection(*anchor) : nullptr;
                if (!c) break;
                std::unordered_set<EntityId> members(c->members.begin(), c->members.end());
                emit(def, select([&](const ScoredResult& r) { return members.contains(r.video); }),
                     render_label(def.label_template, anchor_name, ""), anchor);
                break;
            }
        }
    }
    return out;
}

namespace {

double jaccard(const std::vector<EntityId>& a, const std::vector<EntityId>& b) {
    std::vector<EntityId> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    const std::size_t uni = a.size() + b.size() - common.size();
    return uni == 0 ? 0.0 : static_cast<double>(common.size()) / static_cast<double>(uni);
}

}  // namespace

std::vector<ResultGroup> rank_groups(std::span<const CandidateGroup> candidates,
                                     std::span<const ScoredResult> ranked, const RankParams& params) {
    std::unordered_map<EntityId, double> scores;
    for (const auto& r : ranked) scores.emplace(r.video, r.score);

    struct State {
        const CandidateGroup* source;
        std::vector<EntityId> members;
        std::vector<EntityId> original_sorted;
        bool alive = true;
    };
    std::vector<State> states;
    for (const auto& c : candidates) {
        auto sorted = c.members;
        std::sort(sorted.begin(), sorted.end());
        states.push_back({&c, c.members, std::move(sorted)});
    }

    const bool narrow = params.specificity >= params.tau_narrow;
    std::vector<const std::vector<EntityId>*> selected_originals;
    std::vector<ResultGroup> out;

    while (out.size() < params.max_groups) {
        State* best = nullptr;
        double best_value = 0.0;
        for (auto& s : states) {
            if (!s.alive) continue;
            double mass = 0.0;
            for (EntityId id : s.members) {
                auto it = scores.find(id);
                if (it != scores.end()) mass += it->second;
            }
            double overlap = 0.0;
            for (const auto* original : selected_originals) overlap = std::max(overlap, jaccard(s.original_sorted, *original));
            double value = s.source->priority * mass * (1.0 - params.lambda_div * overlap);
            if (is_anchor_kind(s.source->kind) == narrow) value *= params.boost;
            if (value <= 0.0) continue;
            const bool better = !best || value > best_value ||
                                (value == best_value &&
                                 (s.source->evidence.definition < best->source->evidence.definition ||
                                  (s.source->evidence.definition == best->source->evidence.definition &&
                                   s.source->header < best->source->header)));
            if (better) {
                best = &s;
                best_value = value;
            }
        }
        if (!best) break;

        best->alive = false;
        selected_originals.push_back(&best->original_sorted);
        out.push_back(ResultGroup{best->source->header, best->members, best->source->evidence});

        const std::unordered_set<EntityId> taken(best->members.begin(), best->members.end());
        for (auto& s : states) {
            if (!s.alive) continue;
            std::erase_if(s.members, [&](EntityId id) { return taken.contains(id); });
            if (s.members.size() < s.source->min_size) s.alive = false;
        }
    }
    return out;
}

std::vector<std::string> make_pills(EntityId anchor, const Catalog& catalog, std::span<const ScoredResult> ranked,
                                    std::size_t max_pills) {
    if (!catalog.contains(anchor)) throw NotFoundError(anchor);
    const Video* video = catalog.find_video(anchor);
    if (!video) throw ValidationError("pill anchor " + to_string(anchor) + " is not a video");

    std::vector<std::pair<std::string, std::size_t>> counted;
    for (const auto& tag : video->tags) {
        std::size_t n = 0;
        for (const auto& r : ranked) {
            const Video* v = catalog.find_video(r.video);
            if (v && v->available && v->has_tag(tag)) ++n;
        }
        counted.emplace_back(tag, n);
    }
    std::sort(counted.begin(), counted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> pills;
    for (auto& [tag, n] : counted) {
        if (pills.size() >= max_pills) break;
        pills.push_back(std::move(tag));
    }
    return pills;
}

SearchPage compose_page(std::vector<ResultGroup> groups, const FacetEstimate& facets, const IntentEstimate& intent,
                        std::vector<std::string> pills) {
    SearchPage page;
    std::set<std::string> headers;
    for (auto& g : groups) {
        if (!headers.insert(g.header).second) {
            for (int n = 2;; ++n) {
                auto candidate = g.header + " · " + std::to_string(n);
                if (headers.insert(candidate).second) {
                    g.header = std::move(candidate);
                    break;
                }
            }
        }
    }
    page.groups = std::move(groups);
    if (facets.argmax() == Facet::UnavailableVideo) page.pills = std::move(pills);
    page.facets = facets;
    page.intent = intent;
    return page;
}

}  // namespace shelf
