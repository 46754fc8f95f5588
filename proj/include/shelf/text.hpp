#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace shelf {

/// Lowercases, folds Latin diacritics to ASCII, turns punctuation into
/// separators and collapses whitespace. Apostrophes are dropped without a
/// separator so "don't" folds to "dont".
std::string normalize(std::string_view text);

/// Splits an already-normalized string on single spaces.
std::vector<std::string> tokenize(std::string_view normalized);

/// normalize() followed by tokenize().
std::vector<std::string> normalize_tokens(std::string_view text);

/// Number of UTF-8 code points in `text`.
std::size_t char_count(std::string_view text);

/// The first `chars` code points of `text`.
std::string_view char_prefix(std::string_view text, std::size_t chars);

}  // namespace shelf
