#include "shelf/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace shelf {

using nlohmann::json;

bool Video::has_tag(std::string_view tag) const {
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

Catalog Catalog::from_entities(std::vector<Video> videos, std::vector<Talent> talents,
                               std::vector<Collection> collections) {
    Catalog catalog;
    auto claim = [&](EntityId id, EntityKind kind, std::size_t index) {
        if (!catalog.slots_.emplace(id, Slot{kind, index}).second) {
            throw ValidationError("duplicate id " + to_string(id));
        }
    };

    for (std::size_t i = 0; i < videos.size(); ++i) {
        const Video& v = videos[i];
        if (v.title.empty()) throw ValidationError("video " + to_string(v.id) + ": empty title");
        if (!(v.popularity >= 0.0 && v.popularity <= 1.0)) {
            throw ValidationError("video " + to_string(v.id) + ": popularity " +
                                  std::to_string(v.popularity) + " out of [0,1]");
        }
        std::unordered_set<std::string_view> seen;
        for (const auto& tag : v.tags) {
            if (tag.empty()) throw ValidationError("video " + to_string(v.id) + ": empty tag");
            if (!seen.insert(tag).second) {
                throw ValidationError("video " + to_string(v.id) + ": duplicate tag '" + tag + "'");
            }
        }
        claim(v.id, EntityKind::Video, i);
    }
    for (std::size_t i = 0; i < talents.size(); ++i) {
        if (talents[i].name.empty()) {
            throw ValidationError("talent " + to_string(talents[i].id) + ": empty name");
        }
        claim(talents[i].id, EntityKind::Talent, i);
    }
    for (std::size_t i = 0; i < collections.size(); ++i) {
        if (collections[i].label.empty()) {
            throw ValidationError("collection " + to_string(collections[i].id) + ": empty label");
        }
        claim(collections[i].id, EntityKind::Collection, i);
    }

    auto is_video = [&](EntityId id) {
        auto it = catalog.slots_.find(id);
        return it != catalog.slots_.end() && it->second.kind == EntityKind::Video;
    };
    for (const auto& t : talents) {
        for (EntityId credit : t.credits) {
            if (!is_video(credit)) {
                throw ValidationError("talent " + to_string(t.id) + ": dangling credit " +
                                      to_string(credit));
            }
        }
    }
    for (const auto& c : collections) {
        std::unordered_set<EntityId> seen;
        for (EntityId member : c.members) {
            if (!is_video(member)) {
                throw ValidationError("collection " + to_string(c.id) + ": dangling member " +
                                      to_string(member));
            }
            if (!seen.insert(member).second) {
                throw ValidationError("collection " + to_string(c.id) + ": duplicate member " +
                                      to_string(member));
            }
        }
    }

    catalog.videos_ = std::move(videos);
    catalog.talents_ = std::move(talents);
    catalog.collections_ = std::move(collections);
    return catalog;
}

std::optional<EntityRef> Catalog::find(EntityId id) const {
    auto it = slots_.find(id);
    if (it == slots_.end()) return std::nullopt;
    switch (it->second.kind) {
        case EntityKind::Video:
            return EntityRef{&videos_[it->second.index]};
        case EntityKind::Talent:
            return EntityRef{&talents_[it->second.index]};
        case EntityKind::Collection:
            return EntityRef{&collections_[it->second.index]};
    }
    return std::nullopt;
}

std::optional<EntityKind> Catalog::kind_of(EntityId id) const {
    auto it = slots_.find(id);
    if (it == slots_.end()) return std::nullopt;
    return it->second.kind;
}

const Video* Catalog::find_video(EntityId id) const {
    auto it = slots_.find(id);
    if (it == slots_.end() || it->second.kind != EntityKind::Video) return nullptr;
    return &videos_[it->second.index];
}

const Talent* Catalog::find_talent(EntityId id) const {
    auto it = slots_.find(id);
    if (it == slots_.end() || it->second.kind != EntityKind::Talent) return nullptr;
    return &talents_[it->second.index];
}

const Collection* Catalog::find_collection(EntityId id) const {
    auto it = slots_.find(id);
    if (it == slots_.end() || it->second.kind != EntityKind::Collection) return nullptr;
    return &collections_[it->second.index];
}

const std::string& Catalog::display_name(EntityId id) const {
    auto ref = find(id);
    if (!ref) throw NotFoundError(id);
    return std::visit(
        [](auto* entity) -> const std::string& {
            using T = std::remove_cvref_t<decltype(*entity)>;
            if constexpr (std::is_same_v<T, Video>) {
                return entity->title;
            } else if constexpr (std::is_same_v<T, Talent>) {
                return entity->name;
            } else {
                return entity->label;
            }
        },
        *ref);
}

double Catalog::popularity(EntityId id) const {
    const Video* v = find_video(id);
    return v ? v->popularity : 0.0;
}

EntityRef get_entity(const Catalog& catalog, EntityId id) {
    auto ref = catalog.find(id);
    if (!ref) throw NotFoundError(id);
    return *ref;
}

namespace {

EntityId read_id(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) {
        throw ValidationError(std::string("'") + key + "' must be a non-negative integer");
    }
    return EntityId{v.get<std::uint64_t>()};
}

std::vector<EntityId> read_ids(const json& j, const char* key) {
    std::vector<EntityId> ids;
    for (const auto& v : j.at(key)) {
        if (!v.is_number_unsigned()) {
            throw ValidationError(std::string("'") + key + "' entries must be non-negative integers");
        }
        ids.push_back(EntityId{v.get<std::uint64_t>()});
    }
    return ids;
}

}  // namespace

Catalog load_catalog(std::istream& source) {
    std::vector<Video> videos;
    std::vector<Talent> talents;
    std::vector<Collection> collections;

    std::unordered_map<EntityId, std::size_t> first_seen;
    auto claim = [&](EntityId id, std::size_t line_no) {
        auto [it, fresh] = first_seen.emplace(id, line_no);
        if (!fresh) {
            throw ValidationError("duplicate id " + to_string(id) + " (first on line " + std::to_string(it->second) + ")");
        }
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "video") {
                Video v;
                v.id = read_id(j, "id");
                v.title = j.at("title").get<std::string>();
                if (v.title.empty()) throw ValidationError("video " + to_string(v.id) + ": empty title");
                v.aliases = j.value("aliases", std::vector<std::string>{});
                v.available = j.value("available", true);
                v.tags = j.value("tags", std::vector<std::string>{});
                v.release_year = j.value("release_year", 0);
                v.popularity = j.value("popularity", 0.0);
                if (!(v.popularity >= 0.0 && v.popularity <= 1.0)) {
                    throw ValidationError("video " + to_string(v.id) + ": popularity out of [0,1]");
                }
                claim(v.id, line_no);
                videos.push_back(std::move(v));
            } else if (kind == "talent") {
                talents.push_back(Talent{read_id(j, "id"), j.at("name").get<std::string>(),
                                         read_ids(j, "credits")});
                claim(talents.back().id, line_no);
            } else if (kind == "collection") {
                collections.push_back(Collection{read_id(j, "id"), j.at("label").get<std::string>(),
                                                 read_ids(j, "members")});
                claim(collections.back().id, line_no);
            } else {
                throw ParseError(line_no, "unknown kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return Catalog::from_entities(std::move(videos), std::move(talents), std::move(collections));
}

Catalog load_catalog_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open catalog file '" + path + "'");
    return load_catalog(in);
}

void write_catalog_jsonl(const Catalog& catalog, std::ostream& out) {
    auto ids = [](const std::vector<EntityId>& v) {
        json arr = json::array();
        for (EntityId id : v) arr.push_back(id.value);
        return arr;
    };
    for (const auto& v : catalog.videos()) {
        out << json{{"kind", "video"},       {"id", v.id.value},     {"title", v.title},
                    {"aliases", v.aliases},  {"available", v.available}, {"tags", v.tags},
                    {"release_year", v.release_year}, {"popularity", v.popularity}}
                   .dump()
            << '\n';
    }
    for (const auto& t : catalog.talents()) {
        out << json{{"kind", "talent"}, {"id", t.id.value}, {"name", t.name}, {"credits", ids(t.credits)}}
                   .dump()
            << '\n';
    }
    for (const auto& c : catalog.collections()) {
        out << json{{"kind", "collection"}, {"id", c.id.value}, {"label", c.label}, {"members", ids(c.members)}}
                   .dump()
            << '\n';
    }
}

}  // namespace shelf
