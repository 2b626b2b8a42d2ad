#include <doctest.h>

#include "ctrag/text.hpp"
#include "ctrag/time.hpp"

using namespace ctrag;
using V = std::vector<std::string>;

TEST_CASE("tokenize lowercases and splits on punctuation") {
  CHECK(tokenize("Guitar Class!") == V{"guitar", "class"});
  CHECK(tokenize("LLM Discussion 2023") == V{"llm", "discussion", "2023"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  ,;- ").empty());
  CHECK(tokenize("What's up") == V{"what", "s", "up"});
}

TEST_CASE("tokenize keeps non-ASCII letters and folds capitals") {
  CHECK(tokenize("Café DÉJÀ") == V{"café", "déjà"});
  CHECK(tokenize("ΑΒΓ Москва") == V{"αβγ", "москва"});
  // stray continuation byte splits like punctuation
  CHECK(tokenize(std::string("ab\x80" "cd")) == V{"ab", "cd"});
}

TEST_CASE("subword analyzer adds boundary-marked trigrams") {
  CHECK(tokenize_with_subwords("Go", 3) == V{"go", "##go", "#go#"});
  CHECK(tokenize_with_subwords("cat", 3) == V{"cat", "##ca", "#cat", "#at#"});
  CHECK(tokenize_with_subwords("cat dog", 0) == tokenize("cat dog"));
}

TEST_CASE("content_terms drops function words only") {
  CHECK(content_terms("What's the weather like where I'm headed?") == V{"weather", "headed"});
  CHECK(content_terms("guitar class") == V{"guitar", "class"});
  CHECK(is_stopword("the"));
  CHECK_FALSE(is_stopword("guitar"));
}

TEST_CASE("hash64 is stable and seed dependent") {
  CHECK(hash64("guitar", 1) == hash64("guitar", 1));
  CHECK(hash64("guitar", 1) != hash64("guitar", 2));
  CHECK(hash64("guitar", 1) != hash64("guitars", 1));
}

TEST_CASE("RFC 3339 round trip and offsets") {
  auto t = parse_rfc3339("2023-12-07T11:18:19Z");
  REQUIRE(t);
  CHECK(format_rfc3339(*t) == "2023-12-07T11:18:19Z");
  CHECK(format_date(*t) == "2023-12-07");
  CHECK(hour_of_day(*t) == 11);

  auto shifted = parse_rfc3339("2023-12-07T13:18:19+02:00");
  REQUIRE(shifted);
  CHECK(*shifted == *t);
  auto frac = parse_rfc3339("2023-12-07T11:18:19.75Z");
  REQUIRE(frac);
  CHECK(*frac == *t);
}

TEST_CASE("RFC 3339 rejects malformed input") {
  for (const char* bad : {"", "2023-12-07", "2023-12-07 11:18:19Z", "2023-13-07T11:18:19Z", "2023-02-30T11:18:19Z",
                          "2023-12-07T24:00:00Z", "2023-12-07T11:18:19", "2023-12-07T11:18:19Zx",
                          "2023-12-07T11:18:19+0200"}) {
    CAPTURE(bad);
    CHECK_FALSE(parse_rfc3339(bad).has_value());
  }
}
