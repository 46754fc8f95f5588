#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>

#include <json.hpp>

#include "shelf/behavior.hpp"
#include "shelf/catalog.hpp"

namespace shelf {

/// Seeded generator whose draws depend only on the 64-bit engine output, so
/// runs are byte-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform in [0, n); n must be positive.
    std::size_t below(std::size_t n);
    /// Index drawn proportionally to `weights` (all zero falls back to uniform).
    std::size_t weighted(const std::vector<double>& weights);

private:
    std::mt19937_64 engine_;
};

/// Synthetic behaviour covering both ends of the fetch/explore spectrum.
///
/// A fetch session picks a target video (popularity-weighted, unavailable
/// titles included), types a prefix of its normalized title and selects it:
/// one search event, plus one play event when the target is available.
/// An explore session picks a tag from the profile's affinity and plays
/// `plays_per_explore_session` videos carrying it. Explore plays may land on
/// unavailable titles; they stand for viewing that happened while the title
/// was still licensed.
struct SimConfig {
    std::size_t n_profiles = 100;
    std::size_t n_fetch_sessions = 500;
    std::size_t n_explore_sessions = 500;
    std::uint64_t seed = 7;
    std::size_t plays_per_explore_session = 5;
    std::size_t tags_per_profile = 2;
    /// Typed prefix length is min(title length, min_typed + geometric(stop)).
    std::size_t min_typed_chars = 3;
    double stop_typing_probability = 0.25;
    std::int64_t start_timestamp = 1'600'000'000;
};

nlohmann::json to_json(const SimConfig& config);

/// Writes JSONL events. Throws ValidationError for a catalog without videos.
void simulate_logs(const SimConfig& config, const Catalog& catalog, std::ostream& out);
InteractionLog simulate_log(const SimConfig& config, const Catalog& catalog);

struct CatalogGenConfig {
    std::size_t videos = 2000;
    std::size_t talents = 300;
    std::size_t tags = 40;
    std::uint64_t seed = 11;
    double unavailable_fraction = 0.15;
};

/// Random but pronounceable titles, Zipf-like popularity, one collection per
/// tag and talents credited on a handful of videos each.
Catalog generate_catalog(const CatalogGenConfig& config);

}  // namespace shelf
