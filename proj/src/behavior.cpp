#include "shelf/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "shelf/text.hpp"

namespace shelf {

using nlohmann::json;

namespace {

EntityId read_entity(const json& j, const char* key, std::size_t line_no) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) {
        throw ParseError(line_no, std::string("'") + key + "' must be a non-negative integer");
    }
    return EntityId{v.get<std::uint64_t>()};
}

}  // namespace

InteractionLog load_logs(std::istream& source, const Catalog& catalog) {
    InteractionLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "play") {
                PlayEvent e{j.at("profile").get<std::string>(), read_entity(j, "video", line_no),
                            j.value("ts", std::int64_t{0})};
                if (!catalog.find_video(e.video)) {
                    throw ParseError(line_no, "unknown video id " + to_string(e.video));
                }
                log.plays.push_back(std::move(e));
            } else if (kind == "search") {
                SearchEvent e{j.at("profile").get<std::string>(), j.at("query").get<std::string>(),
                              read_entity(j, "selected", line_no), j.value("position", 0)};
                if (!catalog.contains(e.selected)) {
                    throw ParseError(line_no, "unknown entity id " + to_string(e.selected));
                }
                if (e.position < 0) throw ParseError(line_no, "negative position");
                log.searches.push_back(std::move(e));
            } else {
                throw ParseError(line_no, "unknown kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return log;
}

InteractionLog load_logs_file(const std::string& path, const Catalog& catalog) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open log file '" + path + "'");
    return load_logs(in, catalog);
}

std::string to_jsonl(const PlayEvent& event) {
    return json{{"kind", "play"}, {"profile", event.profile}, {"video", event.video.value}, {"ts", event.timestamp}}
        .dump();
}

std::string to_jsonl(const SearchEvent& event) {
    return json{{"kind", "search"},
                {"profile", event.profile},
                {"query", event.query},
                {"selected", event.selected.value},
                {"position", event.position}}
        .dump();
}

CoPlayModel CoPlayModel::build(const InteractionLog& log, std::uint32_t min_support) {
    if (min_support < 1) throw std::invalid_argument("min_support must be >= 1");

    std::unordered_map<std::string_view, std::vector<EntityId>> by_profile;
    for (const auto& play : log.plays) by_profile[play.profile].push_back(play.video);

    CoPlayModel model;
    model.min_support_ = min_support;
    std::unordered_map<EntityId, std::unordered_map<EntityId, std::uint32_t>> upper;
    for (auto& [profile, videos] : by_profile) {
        std::sort(videos.begin(), videos.end());
        videos.erase(std::unique(videos.begin(), videos.end()), videos.end());
        for (std::size_t a = 0; a < videos.size(); ++a) {
            ++model.items_[videos[a]].count;
            auto& row = upper[videos[a]];
            for (std::size_t b = a + 1; b < videos.size(); ++b) ++row[videos[b]];
        }
    }
    for (const auto& [i, row] : upper) {
        for (const auto& [j, count] : row) {
            if (count < min_support) continue;
            model.items_[i].neighbors.push_back({j, count, 0.0});
            model.items_[j].neighbors.push_back({i, count, 0.0});
            ++model.pair_count_;
        }
    }
    for (auto& [id, item] : model.items_) {
        std::sort(item.neighbors.begin(), item.neighbors.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.video < b.video; });
        for (auto& n : item.neighbors) {
            n.similarity = static_cast<double>(n.count) /
                           std::sqrt(static_cast<double>(item.count) * static_cast<double>(model.items_.at(n.video).count));
        }
    }
    return model;
}

std::uint32_t CoPlayModel::item_count(EntityId video) const {
    auto it = items_.find(video);
    return it == items_.end() ? 0 : it->second.count;
}

std::span<const CoPlayModel::Neighbor> CoPlayModel::neighbors(EntityId video) const {
    auto it = items_.find(video);
    if (it == items_.end()) return {};
    return it->second.neighbors;
}

std::uint32_t CoPlayModel::co_count(EntityId i, EntityId j) const {
    if (i == j) return item_count(i);
    auto list = neighbors(i);
    auto it = std::lower_bound(list.begin(), list.end(), j,
                               [](const Neighbor& n, EntityId id) { return n.video < id; });
    return (it != list.end() && it->video == j) ? it->count : 0;
}

double item_similarity(const CoPlayModel& model, EntityId i, EntityId j) {
    const auto ci = model.item_count(i);
    const auto cj = model.item_count(j);
    if (ci == 0) throw UndefinedItemError(i);
    if (cj == 0) throw UndefinedItemError(j);
    if (i == j) return 1.0;
    auto list = model.neighbors(i);
    auto it = std::lower_bound(list.begin(), list.end(), j,
                               [](const CoPlayModel::Neighbor& n, EntityId id) { return n.video < id; });
    return (it != list.end() && it->video == j) ? it->similarity : 0.0;
}

namespace {

template <typename T, typename Key>
void sort_by_score(std::vector<T>& items, const Catalog& catalog, Key key) {
    std::sort(items.begin(), items.end(), [&](const T& a, const T& b) {
        const double sa = key(a).second, sb = key(b).second;
        if (sa != sb) return sa > sb;
        const double pa = catalog.popularity(key(a).first), pb = catalog.popularity(key(b).first);
        if (pa != pb) return pa > pb;
        return key(a).first < key(b).first;
    });
}

}  // namespace

std::vector<ScoredEntity> similar_videos(const CoPlayModel& model, EntityId anchor, std::size_t k,
                                         const Catalog& catalog) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (model.item_count(anchor) == 0) throw UndefinedItemError(anchor);
    std::vector<ScoredEntity> out;
    for (const auto& n : model.neighbors(anchor)) {
        const Video* v = catalog.find_video(n.video);
        if (!v || !v->available || n.video == anchor) continue;
        out.push_back({n.video, n.similarity});
    }
    sort_by_score(out, catalog, [](const ScoredEntity& s) { return std::pair{s.entity, s.score}; });
    if (out.size() > k) out.resize(k);
    return out;
}

QueryAssociationModel QueryAssociationModel::build(const InteractionLog& log) {
    std::unordered_map<std::string, std::map<EntityId, std::uint32_t>> counts;
    for (const auto& e : log.searches) {
        std::string key = normalize(e.query);
        if (key.empty()) continue;
        ++counts[std::move(key)][e.selected];
    }
    QueryAssociationModel model;
    for (auto& [query, per_entity] : counts) {
        auto& row = model.table_[query];
        row.assign(per_entity.begin(), per_entity.end());
    }
    return model;
}

std::span<const std::pair<EntityId, std::uint32_t>> QueryAssociationModel::counts(
    std::string_view normalized_query) const {
    auto it = table_.find(std::string(normalized_query));
    if (it == table_.end()) return {};
    return it->second;
}

std::vector<ScoredEntity> query_associations(const QueryAssociationModel& model, std::string_view query) {
    const auto row = model.counts(normalize(query));
    std::uint32_t top = 0;
    for (const auto& [id, count] : row) top = std::max(top, count);
    std::vector<ScoredEntity> out;
    if (top == 0) return out;
    for (const auto& [id, count] : row) {
        out.push_back({id, static_cast<double>(count) / static_cast<double>(top)});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ScoredEntity& a, const ScoredEntity& b) { return a.score > b.score; });
    return out;
}

std::vector<SearchRecommendation> recommend_for_context(std::span<const ContextAnchor> anchors,
                                                        std::string_view query,
                                                        const CoPlayModel& coplay,
                                                        const QueryAssociationModel& associations,
                                                        const Catalog& catalog, std::size_t k) {
    struct Evidence {
        double collaborative = 0.0;
        double association = 0.0;
        std::vector<EntityId> anchors;
    };
    std::unordered_map<EntityId, Evidence> evidence;
    evidence.reserve(1024);

    for (const auto& anchor : anchors) {
        if (!(anchor.weight >= 0.0 && anchor.weight <= 1.0)) {
            throw std::invalid_argument("anchor weight must lie in [0,1]");
        }
        std::vector<EntityId> expanded;
        if (catalog.find_video(anchor.entity)) {
            expanded.push_back(anchor.entity);
        } else if (const Talent* t = catalog.find_talent(anchor.entity)) {
            expanded = t->credits;
        } else if (const Collection* c = catalog.find_collection(anchor.entity)) {
            expanded = c->members;
        }
        if (expanded.empty() || anchor.weight == 0.0) continue;
        const double share = anchor.weight / static_cast<double>(expanded.size());

        auto credit = [&](EntityId video, double amount) {
            if (amount <= 0.0) return;
            auto& ev = evidence[video];
            ev.collaborative += amount;
            if (ev.anchors.empty() || ev.anchors.back() != anchor.entity) ev.anchors.push_back(anchor.entity);
        };
        for (EntityId item : expanded) {
            credit(item, share);
            for (const auto& n : coplay.neighbors(item)) credit(n.video, share * n.similarity);
        }
    }
    for (const auto& assoc : query_associations(associations, query)) {
        evidence[assoc.entity].association = assoc.score;
    }

    std::vector<SearchRecommendation> out;
    for (auto& [video, ev] : evidence) {
        const Video* v = catalog.find_video(video);
        if (!v || !v->available) continue;
        const double score = std::clamp(std::max(ev.collaborative, ev.association), 0.0, 1.0);
        if (score <= 0.0) continue;
        std::sort(ev.anchors.begin(), ev.anchors.end());
        ev.anchors.erase(std::unique(ev.anchors.begin(), ev.anchors.end()), ev.anchors.end());
        out.push_back({video, score, std::move(ev.anchors)});
    }
    sort_by_score(out, catalog,
                  [](const SearchRecommendation& r) { return std::pair{r.video, r.association_score}; });
    if (out.size() > k) out.resize(k);
    return out;
}

}  // namespace shelf
