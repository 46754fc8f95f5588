#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "shelf/types.hpp"

namespace shelf {

struct Video {
    EntityId id;
    std::string title;
    std::vector<std::string> aliases;
    bool available = true;
    std::vector<std::string> tags;
    int release_year = 0;
    double popularity = 0.0;

    bool has_tag(std::string_view tag) const;
};

struct Talent {
    EntityId id;
    std::string name;
    std::vector<EntityId> credits;
};

struct Collection {
    EntityId id;
    std::string label;
    std::vector<EntityId> members;
};

enum class EntityKind { Video, Talent, Collection };

using EntityRef = std::variant<const Video*, const Talent*, const Collection*>;

/// Immutable, validated store of all searchable entities. Unavailable videos
/// are kept: they can anchor a query even though they are never results.
class Catalog {
public:
    Catalog() = default;

    /// Validates and takes ownership. Throws ValidationError on duplicate ids,
    /// dangling credits/members or out-of-range fields.
    static Catalog from_entities(std::vector<Video> videos, std::vector<Talent> talents,
                                 std::vector<Collection> collections);

    const std::vector<Video>& videos() const noexcept { return videos_; }
    const std::vector<Talent>& talents() const noexcept { return talents_; }
    const std::vector<Collection>& collections() const noexcept { return collections_; }

    std::size_t size() const noexcept { return slots_.size(); }
    bool empty() const noexcept { return slots_.empty(); }
    bool contains(EntityId id) const { return slots_.contains(id); }

    std::optional<EntityRef> find(EntityId id) const;
    std::optional<EntityKind> kind_of(EntityId id) const;
    const Video* find_video(EntityId id) const;
    const Talent* find_talent(EntityId id) const;
    const Collection* find_collection(EntityId id) const;

    /// Title, name or label. Throws NotFoundError.
    const std::string& display_name(EntityId id) const;

    /// Video popularity; 0 for talent, collections and unknown ids.
    double popularity(EntityId id) const;

private:
    struct Slot {
        EntityKind kind;
        std::size_t index;
    };

    std::vector<Video> videos_;
    std::vector<Talent> talents_;
    std::vector<Collection> collections_;
    std::unordered_map<EntityId, Slot> slots_;
};

/// Reads one JSONL entity record per line (blank lines skipped). Throws
/// ParseError (with the 1-based line number) or ValidationError.
Catalog load_catalog(std::istream& source);
Catalog load_catalog_file(const std::string& path);

/// Throws NotFoundError for unknown ids.
EntityRef get_entity(const Catalog& catalog, EntityId id);

void write_catalog_jsonl(const Catalog& catalog, std::ostream& out);

}  // namespace shelf
