#include "shelf/wire.hpp"

namespace shelf {

using nlohmann::json;

json to_json(const SearchResponse& response) {
    json distribution = json::object();
    for (Facet f : kAllFacets) {
        distribution[std::string(to_string(f))] = response.distribution[static_cast<std::size_t>(f)];
    }
    json groups = json::array();
    for (const auto& g : response.groups) {
        json videos = json::array();
        for (const auto& v : g.videos) {
            videos.push_back({{"id", v.id.value},
                              {"title", v.title},
                              {"available", v.available},
                              {"score", v.score},
                              {"provenance", std::string(to_string(v.provenance))}});
        }
        groups.push_back({{"header", g.header},
                          {"evidence", {{"definition", g.definition},
                                        {"anchor", g.anchor ? json(g.anchor->value) : json(nullptr)}}},
                          {"videos", std::move(videos)}});
    }
    return json{{"query", response.query},
                {"facets",
                 {{"distribution", std::move(distribution)},
                  {"specificity", response.specificity},
                  {"fetch_probability", response.fetch_probability}}},
                {"groups", std::move(groups)},
                {"pills", response.pills},
                {"timing_ms", response.timing_ms},
                {"snapshot", response.snapshot}};
}

SearchResponse search_response_from_json(const json& j) {
    try {
        SearchResponse r;
        r.query = j.at("query").get<std::string>();
        const auto& facets = j.at("facets");
        const auto& distribution = facets.at("distribution");
        for (Facet f : kAllFacets) {
            r.distribution[static_cast<std::size_t>(f)] = distribution.at(std::string(to_string(f))).get<double>();
        }
        r.specificity = facets.at("specificity").get<double>();
        r.fetch_probability = facets.at("fetch_probability").get<double>();
        for (const auto& g : j.at("groups")) {
            WireGroup group;
            group.header = g.at("header").get<std::string>();
            const auto& evidence = g.at("evidence");
            group.definition = evidence.at("definition").get<std::string>();
            if (!evidence.at("anchor").is_null()) group.anchor = EntityId{evidence.at("anchor").get<std::uint64_t>()};
            for (const auto& v : g.at("videos")) {
                group.videos.push_back(WireVideo{EntityId{v.at("id").get<std::uint64_t>()},
                                                 v.at("title").get<std::string>(), v.at("available").get<bool>(),
                                                 v.at("score").get<double>(),
                                                 parse_provenance(v.at("provenance").get<std::string>())});
            }
            r.groups.push_back(std::move(group));
        }
        r.pills = j.at("pills").get<std::vector<std::string>>();
        r.timing_ms = j.at("timing_ms").get<double>();
        r.snapshot = j.at("snapshot").get<std::uint64_t>();
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("search response: ") + e.what());
    }
}

std::string body_without_timing(const SearchResponse& response) {
    json j = to_json(response);
    j.erase("timing_ms");
    return j.dump();
}

}  // namespace shelf
