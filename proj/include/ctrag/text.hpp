#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ctrag {

/// Lowercases and splits on anything that is not a letter or digit. UTF-8 aware:
/// non-ASCII letters stay inside words and common Latin-1, Greek and Cyrillic
/// capitals are folded. Invalid UTF-8 bytes act as separators.
std::vector<std::string> tokenize(std::string_view text);

/// Word tokens plus boundary-padded character n-grams of each word (`#gu`, `gui`, ...),
/// the latter prefixed with `#` so they never collide with a word token.
/// `ngram == 0` yields plain `tokenize`.
std::vector<std::string> tokenize_with_subwords(std::string_view text, int ngram);

/// `tokenize` with a short list of English function words removed. Used as the
/// BM25 analyzer for context stores.
std::vector<std::string> content_terms(std::string_view text);

bool is_stopword(std::string_view token);

/// Seeded 64-bit FNV-1a with a splitmix64 finalizer. Stable across platforms.
std::uint64_t hash64(std::string_view data, std::uint64_t seed);

}  // namespace ctrag
