#include "ctrag/text.hpp"

#include <unordered_set>

namespace ctrag {

namespace {

// Decodes one code point; returns 0xFFFFFFFF on an invalid sequence and advances by one byte.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFFFFFF;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFFFFFF;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFFFFFF;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  }
  if (c == 0xFFFFFFFF) return false;
  if (c <= 0xBF) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if (c >= 0xFF00 && c <= 0xFF0F) return false;
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;  // emoji
  return true;
}

char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = next_code_point(text, i);
    if (is_word_char(c)) {
      append_utf8(current, to_lower(c));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<std::string> tokenize_with_subwords(std::string_view text, int ngram) {
  std::vector<std::string> words = tokenize(text);
  if (ngram <= 0) return words;
  std::vector<std::string> out;
  out.reserve(words.size() * 6);
  for (const auto& w : words) {
    out.push_back(w);
    // n-grams over code points of "<w>" with '#' as boundary marker
    std::vector<std::string> cps{"#"};
    std::size_t i = 0;
    while (i < w.size()) {
      const std::size_t start = i;
      next_code_point(w, i);
      cps.emplace_back(w.substr(start, i - start));
    }
    cps.emplace_back("#");
    const auto n = static_cast<std::size_t>(ngram);
    if (cps.size() < n) continue;
    for (std::size_t s = 0; s + n <= cps.size(); ++s) {
      std::string g = "#";
      for (std::size_t k = s; k < s + n; ++k) g += cps[k];
      out.push_back(std::move(g));
    }
  }
  return out;
}

bool is_stopword(std::string_view token) {
  static const std::unordered_set<std::string_view> kStopwords{
      "a",    "an",   "and",  "are",  "as",   "at",   "be",   "but",  "by",    "can",  "d",
      "did",  "do",   "does", "for",  "from", "had",  "has",  "have", "i",     "if",   "in",
      "is",   "it",   "its",  "ll",   "m",    "me",   "my",   "of",   "on",    "or",   "our",
      "re",   "s",    "so",   "t",    "that", "the",  "their", "them", "then", "there", "these",
      "they", "this", "to",   "ve",   "was",  "we",   "were", "what", "when",  "where", "which",
      "who",  "will", "with", "would", "you", "your", "like", "just", "any",  "some", "about"};
  return kStopwords.count(token) > 0;
}

std::vector<std::string> content_terms(std::string_view text) {
  auto tokens = tokenize(text);
  std::erase_if(tokens, [](const std::string& t) { return is_stopword(t); });
  return tokens;
}

std::uint64_t hash64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (const char ch : data) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

}  // namespace ctrag
