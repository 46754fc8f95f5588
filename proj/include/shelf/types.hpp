#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace shelf {

/// Identifier shared by every catalog entity kind (video, talent, collection).
struct EntityId {
    std::uint64_t value = 0;

    friend constexpr auto operator<=>(EntityId, EntityId) = default;
};

inline std::string to_string(EntityId id) { return std::to_string(id.value); }

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(EntityId id)
        : Error("entity " + to_string(id) + " not found"), id_(id) {}

    EntityId id() const noexcept { return id_; }

private:
    EntityId id_;
};

/// Raised when similarity is requested for an item without any plays.
class UndefinedItemError : public Error {
public:
    explicit UndefinedItemError(EntityId id)
        : Error("item " + to_string(id) + " has no plays"), id_(id) {}

    EntityId id() const noexcept { return id_; }

private:
    EntityId id_;
};

}  // namespace shelf

template <>
struct std::hash<shelf::EntityId> {
    std::size_t operator()(shelf::EntityId id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
