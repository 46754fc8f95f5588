#include "shelf/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <variant>

#include "shelf/text.hpp"

namespace shelf {

std::size_t Rng::below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

std::size_t Rng::weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return below(weights.size());
    double target = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        target -= weights[i];
        if (target < 0.0) return i;
    }
    return weights.size() - 1;
}

nlohmann::json to_json(const SimConfig& c) {
    return {{"n_profiles", c.n_profiles},
            {"n_fetch_sessions", c.n_fetch_sessions},
            {"n_explore_sessions", c.n_explore_sessions},
            {"seed", c.seed},
            {"plays_per_explore_session", c.plays_per_explore_session},
            {"tags_per_profile", c.tags_per_profile},
            {"min_typed_chars", c.min_typed_chars},
            {"stop_typing_probability", c.stop_typing_probability}};
}

namespace {

using Event = std::variant<PlayEvent, SearchEvent>;

std::vector<Event> generate_events(const SimConfig& config, const Catalog& catalog) {
    const auto& videos = catalog.videos();
    if (videos.empty()) throw ValidationError("cannot simulate sessions over a catalog without videos");
    if (config.n_profiles == 0) throw ValidationError("n_profiles must be positive");

    Rng rng(config.seed);

    std::vector<double> popularity_weights;
    std::map<std::string, std::vector<std::size_t>> by_tag;
    for (std::size_t i = 0; i < videos.size(); ++i) {
        popularity_weights.push_back(videos[i].popularity + 0.01);
        for (const auto& tag : videos[i].tags) by_tag[tag].push_back(i);
    }
    std::vector<std::string> tags;
    for (const auto& [tag, members] : by_tag) tags.push_back(tag);

    struct Profile {
        std::string name;
        std::vector<std::size_t> tags;
        std::vector<double> weights;
    };
    std::vector<Profile> profiles;
    for (std::size_t p = 0; p < config.n_profiles; ++p) {
        Profile profile{"p" + std::to_string(p), {}, {}};
        const std::size_t want = std::min(config.tags_per_profile, tags.size());
        while (profile.tags.size() < want) {
            const std::size_t t = rng.below(tags.size());
            if (std::find(profile.tags.begin(), profile.tags.end(), t) != profile.tags.end()) continue;
            profile.tags.push_back(t);
            profile.weights.push_back(0.2 + 0.8 * rng.uniform());
        }
        profiles.push_back(std::move(profile));
    }

    std::vector<bool> is_fetch(config.n_fetch_sessions + config.n_explore_sessions, false);
    std::fill(is_fetch.begin(), is_fetch.begin() + static_cast<std::ptrdiff_t>(config.n_fetch_sessions), true);
    for (std::size_t i = is_fetch.size(); i > 1; --i) {
        const std::size_t j = rng.below(i);
        const bool tmp = is_fetch[i - 1];
        is_fetch[i - 1] = is_fetch[j];
        is_fetch[j] = tmp;
    }

    std::vector<Event> events;
    for (std::size_t s = 0; s < is_fetch.size(); ++s) {
        const Profile& profile = profiles[rng.below(profiles.size())];
        std::int64_t ts = config.start_timestamp + static_cast<std::int64_t>(s) * 600;
        if (is_fetch[s]) {
            const Video& target = videos[rng.weighted(popularity_weights)];
            const std::string title = normalize(target.title);
            std::size_t typed = config.min_typed_chars;
            while (rng.uniform() >= config.stop_typing_probability && typed < char_count(title)) ++typed;
            std::string query(char_prefix(title, std::min(typed, char_count(title))));
            while (!query.empty() && query.back() == ' ') query.pop_back();
            events.emplace_back(SearchEvent{profile.name, query, target.id, 0});
            if (target.available) events.emplace_back(PlayEvent{profile.name, target.id, ts + 5});
        } else if (!profile.tags.empty()) {
            const auto& pool = by_tag[tags[profile.tags[rng.weighted(profile.weights)]]];
            std::vector<double> weights;
            for (std::size_t idx : pool) weights.push_back(popularity_weights[idx]);
            const std::size_t plays = std::min(config.plays_per_explore_session, pool.size());
            std::vector<std::size_t> chosen;
            while (chosen.size() < plays) {
                const std::size_t pick = rng.weighted(weights);
                weights[pick] = 0.0;
                chosen.push_back(pool[pick]);
            }
            for (std::size_t idx : chosen) {
                ts += 60;
                events.emplace_back(PlayEvent{profile.name, videos[idx].id, ts});
            }
        }
    }
    return events;
}

}  // namespace

void simulate_logs(const SimConfig& config, const Catalog& catalog, std::ostream& out) {
    for (const auto& e : generate_events(config, catalog)) {
        std::visit([&](const auto& event) { out << to_jsonl(event) << '\n'; }, e);
    }
}

InteractionLog simulate_log(const SimConfig& config, const Catalog& catalog) {
    InteractionLog log;
    for (auto& e : generate_events(config, catalog)) {
        if (auto* play = std::get_if<PlayEvent>(&e)) {
            log.plays.push_back(std::move(*play));
        } else {
            log.searches.push_back(std::move(std::get<SearchEvent>(e)));
        }
    }
    return log;
}

namespace {

constexpr std::array<const char*, 40> kTagNames = {
    "Action",         "Adventure",      "Animation",       "Anime",          "Based on a Book",
    "Based on a Video Game", "Biopic",  "Buddy Movies",    "Chases",         "Comedy",
    "Coming of Age",  "Crime",          "Cult Classics",   "Documentary",    "Drama",
    "Family",         "Fantasy",        "Feel-Good",       "Goofy Movies",   "Heist",
    "Historical",     "Horror",         "Independent",     "Kids TV",        "Martial Arts",
    "Musical",        "Myths & Legends", "Mystery",        "Political",      "Reality TV",
    "Romance",        "Satire",         "Sci-Fi",          "Space",          "Sports",
    "Stand-Up",       "Superheroes",    "Thriller",        "War",            "Westerns",
};

constexpr std::array<const char*, 32> kSyllables = {
    "ka", "lo", "mi", "ra", "ten", "shu", "vor", "el", "dan", "qui", "ber", "sol", "na", "thi", "gor", "pel",
    "zu",  "ma", "ri", "fen", "ox", "ly", "cor", "ta", "ven", "ho", "ju", "bri", "sta", "wen", "dra", "ix",
};

std::string make_word(Rng& rng) {
    std::string word;
    const std::size_t syllables = 1 + rng.below(3);
    for (std::size_t i = 0; i < syllables; ++i) word += kSyllables[rng.below(kSyllables.size())];
    word[0] = static_cast<char>(word[0] - 'a' + 'A');
    return word;
}

}  // namespace

Catalog generate_catalog(const CatalogGenConfig& config) {
    Rng rng(config.seed);
    std::vector<std::string> tag_names;
    for (std::size_t t = 0; t < config.tags; ++t) {
        tag_names.push_back(t < kTagNames.size() ? std::string(kTagNames[t]) : "Theme " + std::to_string(t + 1));
    }

    std::vector<std::string> vocabulary;
    for (std::size_t i = 0; i < 3000; ++i) vocabulary.push_back(make_word(rng));

    std::vector<std::size_t> ranks(config.videos);
    for (std::size_t i = 0; i < ranks.size(); ++i) ranks[i] = i;
    for (std::size_t i = ranks.size(); i > 1; --i) std::swap(ranks[i - 1], ranks[rng.below(i)]);

    std::uint64_t next_id = 1;
    std::vector<Video> videos;
    std::map<std::string, std::vector<EntityId>> members;
    for (std::size_t i = 0; i < config.videos; ++i) {
        Video v;
        v.id = EntityId{next_id++};
        const std::size_t words = 1 + rng.below(4);
        for (std::size_t w = 0; w < words; ++w) {
            if (w) v.title += ' ';
            v.title += vocabulary[rng.below(vocabulary.size())];
        }
        v.available = rng.uniform() >= config.unavailable_fraction;
        const std::size_t tag_count = tag_names.empty() ? 0 : 1 + rng.below(std::min<std::size_t>(3, tag_names.size()));
        while (v.tags.size() < tag_count) {
            const auto& tag = tag_names[rng.below(tag_names.size())];
            if (!v.has_tag(tag)) v.tags.push_back(tag);
        }
        v.release_year = 1970 + static_cast<int>(rng.below(55));
        v.popularity = 1.0 / std::pow(1.0 + static_cast<double>(ranks[i]), 0.8);
        for (const auto& tag : v.tags) members[tag].push_back(v.id);
        videos.push_back(std::move(v));
    }

    std::vector<Talent> talents;
    for (std::size_t i = 0; i < config.talents && !videos.empty(); ++i) {
        Talent t;
        t.id = EntityId{next_id++};
        t.name = make_word(rng) + " " + make_word(rng);
        const std::size_t credits = std::min<std::size_t>(videos.size(), 2 + rng.below(7));
        while (t.credits.size() < credits) {
            const EntityId pick = videos[rng.below(videos.size())].id;
            if (std::find(t.credits.begin(), t.credits.end(), pick) == t.credits.end()) t.credits.push_back(pick);
        }
        talents.push_back(std::move(t));
    }

    std::vector<Collection> collections;
    for (const auto& tag : tag_names) {
        collections.push_back(Collection{EntityId{next_id++}, tag, members[tag]});
    }
    return Catalog::from_entities(std::move(videos), std::move(talents), std::move(collections));
}

}  // namespace shelf
