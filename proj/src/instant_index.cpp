#include "shelf/instant_index.hpp"

#include <algorithm>

#include "shelf/text.hpp"

namespace shelf {

namespace {

bool is_prefix(std::string_view prefix, std::string_view token) {
    return token.size() >= prefix.size() && token.compare(0, prefix.size(), prefix) == 0;
}

// Kuhn's augmenting-path matching: can query tokens [0, count) each be
// assigned a distinct name token they prefix?
class PrefixMatcher {
public:
    PrefixMatcher(std::span<const std::string> query, std::span<const std::string> name)
        : query_(query), name_(name), owner_(name.size(), -1), visited_(name.size()) {}

    bool assign_all(std::size_t count) {
        if (count > name_.size()) return false;
        std::fill(owner_.begin(), owner_.end(), -1);
        for (std::size_t q = 0; q < count; ++q) {
            std::fill(visited_.begin(), visited_.end(), false);
            if (!augment(q)) return false;
        }
        return true;
    }

private:
    bool augment(std::size_t q) {
        for (std::size_t t = 0; t < name_.size(); ++t) {
            if (visited_[t] || !is_prefix(query_[q], name_[t])) continue;
            visited_[t] = true;
            if (owner_[t] < 0 || augment(static_cast<std::size_t>(owner_[t]))) {
                owner_[t] = static_cast<int>(q);
                return true;
            }
        }
        return false;
    }

    std::span<const std::string> query_;
    std::span<const std::string> name_;
    std::vector<int> owner_;
    std::vector<bool> visited_;
};

double coverage(std::span<const std::string> tokens, std::size_t count, const IndexedName& name) {
    if (name.token_chars == 0) return 0.0;
    std::size_t chars = 0;
    for (std::size_t i = 0; i < count; ++i) chars += char_count(tokens[i]);
    return std::min(1.0, static_cast<double>(chars) / static_cast<double>(name.token_chars));
}

}  // namespace

IndexedName make_indexed_name(std::string_view raw) {
    IndexedName name;
    name.normalized = normalize(raw);
    name.tokens = tokenize(name.normalized);
    for (const auto& t : name.tokens) name.token_chars += char_count(t);
    return name;
}

std::optional<SearchMatch> score_name(std::span<const std::string> query_tokens,
                                      std::string_view normalized_query, const IndexedName& name,
                                      const MatchParams& params) {
    const std::size_t n = query_tokens.size();
    if (n == 0 || name.tokens.empty()) return std::nullopt;

    PrefixMatcher matcher(query_tokens, name.tokens);
    if (matcher.assign_all(n)) {
        SearchMatch m;
        m.full_match = true;
        m.matched_tokens = n;
        m.lexical_score = normalized_query == name.normalized ? 1.0 : coverage(query_tokens, n, name);
        return m;
    }
    if (n >= 2 && matcher.assign_all(n - 1)) {
        SearchMatch m;
        m.full_match = false;
        m.matched_tokens = n - 1;
        m.lexical_score = coverage(query_tokens, n - 1, name) * params.partial_penalty;
        return m;
    }
    return std::nullopt;
}

std::vector<std::string> searchable_names(const Catalog& catalog, EntityId id) {
    std::vector<std::string> names;
    if (const Video* v = catalog.find_video(id)) {
        names.push_back(v->title);
        names.insert(names.end(), v->aliases.begin(), v->aliases.end());
    } else if (const Talent* t = catalog.find_talent(id)) {
        names.push_back(t->name);
    } else if (const Collection* c = catalog.find_collection(id)) {
        names.push_back(c->label);
    }
    return names;
}

InstantIndex InstantIndex::build(const Catalog& catalog, MatchParams params) {
    InstantIndex index;
    index.params_ = params;

    std::vector<EntityId> ids;
    ids.reserve(catalog.size());
    for (const auto& v : catalog.videos()) ids.push_back(v.id);
    for (const auto& t : catalog.talents()) ids.push_back(t.id);
    for (const auto& c : catalog.collections()) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());

    index.entries_.reserve(ids.size());
    for (EntityId id : ids) {
        Entry entry{id, catalog.popularity(id), {}};
        std::uint32_t position = 0;
        for (const auto& raw : searchable_names(catalog, id)) {
            IndexedName name = make_indexed_name(raw);
            for (const auto& token : name.tokens) {
                std::size_t chars = char_count(token);
                for (std::size_t len = 1; len <= chars; ++len) {
                    auto& list = index.postings_[std::string(char_prefix(token, len))];
                    list.push_back(Posting{id, position});
                }
                ++position;
            }
            entry.names.push_back(std::move(name));
        }
        index.entities_.emplace(id, index.entries_.size());
        index.entries_.push_back(std::move(entry));
    }
    return index;
}

std::span<const InstantIndex::Posting> InstantIndex::postings(std::string_view prefix) const {
    auto it = postings_.find(std::string(prefix));
    if (it == postings_.end()) return {};
    return it->second;
}

std::size_t InstantIndex::posting_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [prefix, list] : postings_) n += list.size();
    return n;
}

const InstantIndex::Entry* InstantIndex::entry(EntityId id) const {
    auto it = entities_.find(id);
    return it == entities_.end() ? nullptr : &entries_[it->second];
}

std::vector<SearchMatch> InstantIndex::match_prefix(std::string_view query) const {
    const std::string normalized = normalize(query);
    const std::vector<std::string> tokens = tokenize(normalized);
    if (tokens.empty()) return {};

    // Any match needs the first max(1, n-1) tokens to prefix some entity token.
    const std::size_t required = std::max<std::size_t>(1, tokens.size() - 1);
    std::vector<EntityId> candidates;
    for (std::size_t i = 0; i < required; ++i) {
        std::vector<EntityId> ids;
        for (const Posting& p : postings(tokens[i])) {
            if (ids.empty() || ids.back() != p.entity) ids.push_back(p.entity);
        }
        if (i == 0) {
            candidates = std::move(ids);
        } else {
            std::vector<EntityId> merged;
            std::set_intersection(candidates.begin(), candidates.end(), ids.begin(), ids.end(),
                                  std::back_inserter(merged));
            candidates = std::move(merged);
        }
        if (candidates.empty()) return {};
    }

    std::vector<std::pair<SearchMatch, double>> scored;
    for (EntityId id : candidates) {
        const Entry* e = entry(id);
        std::optional<SearchMatch> best;
        for (const auto& name : e->names) {
            auto m = score_name(tokens, normalized, name, params_);
            if (!m) continue;
            if (!best || (m->full_match && !best->full_match) ||
                (m->full_match == best->full_match && m->lexical_score > best->lexical_score)) {
                best = m;
            }
        }
        if (best) {
            best->entity = id;
            scored.emplace_back(*best, e->popularity);
        }
    }

    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first.lexical_score != b.first.lexical_score) {
            return a.first.lexical_score > b.first.lexical_score;
        }
        if (a.second != b.second) return a.second > b.second;
        return a.first.entity < b.first.entity;
    });
    std::vector<SearchMatch> out;
    out.reserve(scored.size());
    for (auto& [m, pop] : scored) out.push_back(m);
    return out;
}

}  // namespace shelf
