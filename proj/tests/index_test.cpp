#include <algorithm>
#include <set>

#include <doctest.h>

#include "fixtures.hpp"
#include "shelf/instant_index.hpp"
#include "shelf/text.hpp"
#include "support/oracles.hpp"

using namespace shelf;

namespace {

Catalog two_sonics() {
    Video x{EntityId{1}, "Sonic X", {}, true, {}, 2003, 0.6};
    Video h{EntityId{2}, "Sonic the Hedgehog", {}, false, {}, 2020, 0.9};
    Talent adam{EntityId{3}, "Adam Sandler", {EntityId{1}}};
    return Catalog::from_entities({x, h}, {adam}, {});
}

std::vector<std::uint64_t> posted(const InstantIndex& index, std::string_view prefix) {
    std::vector<std::uint64_t> ids;
    for (const auto& p : index.postings(prefix)) ids.push_back(p.entity.value);
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

TEST_SUITE("index") {
    TEST_CASE("every token prefix posts its entity") {
        const InstantIndex index = build_index(two_sonics());
        CHECK(posted(index, "son") == std::vector<std::uint64_t>{1, 2});
        for (std::string prefix : {"a", "ad", "ada", "adam", "s", "sa", "san", "sand", "sandl", "sandle", "sandler"}) {
            const auto ids = posted(index, prefix);
            CHECK_MESSAGE(std::find(ids.begin(), ids.end(), 3) != ids.end(), prefix);
        }
        CHECK(posted(index, "sandlers").empty());
        CHECK(posted(index, "hedgehog") == std::vector<std::uint64_t>{2});
    }

    TEST_CASE("posting lists are sorted by entity id") {
        Rng rng(3);
        for (int round = 0; round < 5; ++round) {
            const InstantIndex index = build_index(oracle::random_catalog(rng, 60));
            for (std::string prefix : {"s", "so", "son", "t", "h", "m", "a", "n"}) {
                const auto list = index.postings(prefix);
                CHECK(std::is_sorted(list.begin(), list.end(),
                                     [](const auto& a, const auto& b) { return a.entity < b.entity; }));
            }
        }
    }

    TEST_CASE("empty catalog and empty query") {
        const InstantIndex empty = build_index(Catalog{});
        CHECK(empty.empty());
        CHECK(empty.prefix_count() == 0);
        CHECK(empty.match_prefix("sonic").empty());
        CHECK(build_index(two_sonics()).match_prefix("").empty());
        CHECK(build_index(two_sonics()).match_prefix(" !? ").empty());
    }

    TEST_CASE("sonic t: full match on the film, penalized partial on the series") {
        const Catalog catalog = load_catalog_file(fixture("sonic_catalog.jsonl"));
        const auto matches = build_index(catalog).match_prefix("sonic t");
        REQUIRE(matches.size() == 2);
        // the halved series still outscores the film: 0.4167 vs 0.375
        const auto& series = matches[0];
        const auto& film = matches[1];
        CHECK(film.entity == EntityId{sonic::kHedgehog});
        CHECK(film.full_match);
        CHECK(film.matched_tokens == 2);
        // "sonic"+"t" = 6 chars of "sonic the hedgehog" = 16 chars
        CHECK(film.lexical_score == doctest::Approx(6.0 / 16.0).epsilon(1e-12));
        CHECK(series.entity == EntityId{sonic::kSonicX});
        CHECK_FALSE(series.full_match);
        CHECK(series.matched_tokens == 1);
        // "sonic" = 5 of "sonic x" = 6 chars, halved
        CHECK(series.lexical_score == doctest::Approx(0.5 * 5.0 / 6.0).epsilon(1e-12));

        std::vector<EntityId> playable;
        for (const auto& m : matches) {
            const Video* v = catalog.find_video(m.entity);
            if (v && v->available) playable.push_back(m.entity);
        }
        CHECK(playable == std::vector<EntityId>{EntityId{sonic::kSonicX}});
    }

    TEST_CASE("exact title equality scores 1") {
        const Catalog catalog = load_catalog_file(fixture("sonic_catalog.jsonl"));
        const auto matches = build_index(catalog).match_prefix("wreck-it ralph");
        REQUIRE_FALSE(matches.empty());
        CHECK(matches[0].entity == EntityId{12});
        CHECK(matches[0].lexical_score == 1.0);
        CHECK(build_index(catalog).match_prefix("Pokemon Detective Pikachu")[0].lexical_score == 1.0);
    }

    TEST_CASE("each query token needs its own name token") {
        Video v{EntityId{1}, "Sonic Sonic", {}, true, {}, 0, 0.1};
        Video w{EntityId{2}, "Sonic", {}, true, {}, 0, 0.1};
        const InstantIndex index = build_index(Catalog::from_entities({v, w}, {}, {}));
        const auto matches = index.match_prefix("so so");
        REQUIRE(matches.size() == 2);
        CHECK(matches[0].entity == EntityId{1});
        CHECK(matches[0].full_match);
        CHECK_FALSE(matches[1].full_match);
    }

    TEST_CASE("matches agree with the brute-force matcher") {
        Rng rng(101);
        for (int round = 0; round < 10; ++round) {
            const Catalog catalog = oracle::random_catalog(rng, 80);
            const InstantIndex index = build_index(catalog);
            for (const auto& v : catalog.videos()) {
                const std::string title = normalize(v.title);
                for (std::size_t p = 1; p <= char_count(title); ++p) {
                    const std::string q(char_prefix(title, p));
                    const auto same = oracle::compare_matches(index.match_prefix(q), oracle::brute_match(catalog, q));
                    CHECK_MESSAGE(same.ok, "query '" << q << "': " << same.detail);
                }
            }
        }
    }

    TEST_CASE("extending a query never creates a full match from nothing") {
        Rng rng(202);
        for (int round = 0; round < 10; ++round) {
            const Catalog catalog = oracle::random_catalog(rng, 80);
            const InstantIndex index = build_index(catalog);
            for (const auto& v : catalog.videos()) {
                const std::string title = normalize(v.title);
                std::set<EntityId> before;
                for (std::size_t p = 1; p <= char_count(title); ++p) {
                    std::set<EntityId> now;
                    for (const auto& m : index.match_prefix(char_prefix(title, p))) {
                        if (p > 1 && m.full_match) CHECK(before.contains(m.entity));
                        now.insert(m.entity);
                    }
                    before = std::move(now);
                }
            }
        }
    }

    TEST_CASE("matching is deterministic and scores stay in range") {
        Rng rng(303);
        const Catalog catalog = oracle::random_catalog(rng, 150);
        const InstantIndex a = build_index(catalog);
        const InstantIndex b = build_index(catalog);
        for (std::string q : {"s", "so t", "super m", "the", "max ov", "poke", "cafe"}) {
            const auto x = a.match_prefix(q);
            const auto y = b.match_prefix(q);
            CHECK(oracle::compare_matches(x, y).ok);
            CHECK(oracle::compare_matches(x, a.match_prefix(q)).ok);
            for (const auto& m : x) {
                CHECK(m.lexical_score >= 0.0);
                CHECK(m.lexical_score <= 1.0);
                if (m.full_match) CHECK(m.matched_tokens == normalize_tokens(q).size());
            }
        }
    }
}
