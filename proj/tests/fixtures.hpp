#pragma once

#include <string>

#ifndef SHELF_FIXTURE_DIR
#error "SHELF_FIXTURE_DIR must be defined by the build"
#endif

inline std::string fixture(const std::string& name) { return std::string(SHELF_FIXTURE_DIR) + "/" + name; }

namespace sonic {
constexpr std::uint64_t kSonicX = 1;
constexpr std::uint64_t kHedgehog = 2;
}  // namespace sonic
