#include <doctest.h>

#include <random>

#include "ctrag/context_index.hpp"
#include "ctrag/errors.hpp"
#include "ctrag/fusion.hpp"
#include "ctrag/metrics.hpp"
#include "ctrag/text.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ctrag;
using ctrag::oracle::list_in_order;
using ctrag::testing::make_item;

namespace {

std::vector<const ContextStore*> stores_of(const Corpus& c, const std::string& persona) {
  return CorpusView(c).stores_of(persona);
}

RankedList random_list(std::mt19937_64& rng) {
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) {
    if (rng() % 2) ids.push_back("d" + std::to_string(i));
  }
  std::shuffle(ids.begin(), ids.end(), rng);
  return list_in_order(ids);
}

// One persona with a store per app, two items each.
Corpus seven_store_corpus() {
  Corpus c;
  c.personas.push_back(ctrag::testing::make_persona("p1"));
  int n = 0;
  for (AppId app : kAllApps) {
    ContextStore s{"p1", app, {}};
    for (int i = 0; i < 2; ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "p1-i%02d", n++);
      s.items.push_back(make_item(id, app, "item " + std::to_string(n), "body text"));
    }
    c.stores.push_back(s);
  }
  c.toolbox = default_toolbox();
  return c;
}

LabeledQuery query_for(const std::string& persona, const std::string& text) {
  LabeledQuery q;
  q.id = "q";
  q.persona_id = persona;
  q.text = text;
  q.timestamp = ctrag::testing::ts("2023-12-07T10:00:00Z");
  return q;
}

}  // namespace

TEST_CASE("RRF hand-computed example") {
  const auto fused = rrf_fuse({list_in_order({"x", "y", "z"}), list_in_order({"y", "z", "x"})}, 60.0, 10);
  CHECK(fused.ids() == std::vector<std::string>{"y", "x", "z"});
  CHECK(fused[0].score == doctest::Approx(0.03252247488101534).epsilon(1e-12));
  CHECK(fused[1].score == doctest::Approx(0.032266458495966696).epsilon(1e-12));
  CHECK(fused[2].score == doctest::Approx(0.03200204813108039).epsilon(1e-12));

  const auto twice = rrf_fuse({list_in_order({"a"}), list_in_order({"a"})}, 60.0, 1);
  CHECK(twice[0].score == doctest::Approx(2.0 / 61.0).epsilon(1e-12));
}

TEST_CASE("RRF argument checks") {
  CHECK_THROWS_AS(rrf_fuse({}, 0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(rrf_fuse({}, 60.0, 0), std::invalid_argument);
  CHECK(rrf_fuse({}, 60.0, 3).empty());
}

TEST_CASE("property: RRF order invariance, single-list preservation, bounds") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<RankedList> lists;
    for (std::size_t n = 1 + rng() % 4; n > 0; --n) lists.push_back(random_list(rng));
    const std::size_t k = 1 + rng() % 10;
    const auto fused = rrf_fuse(lists, 60.0, k);
    auto shuffled = lists;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(rrf_fuse(shuffled, 60.0, k) == fused);

    std::set<std::string> all;
    for (const auto& l : lists) {
      for (const auto& e : l) all.insert(e.item_id);
    }
    CHECK(fused.size() <= k);
    CHECK(fused.size() <= all.size());
    for (const auto& e : fused) {
      CHECK(e.score > 0.0);
      CHECK(all.count(e.item_id) == 1);
    }

    const auto single = rrf_fuse({lists[0]}, 60.0, lists[0].size() + 1);
    CHECK(single.ids() == lists[0].ids());
    for (std::size_t r = 0; r < single.size(); ++r) CHECK(single[r].score == 1.0 / (61.0 + static_cast<double>(r)));
  }
}

TEST_CASE("fuse-stores with tied store winners interleaves them") {
  const Corpus c = seven_store_corpus();
  const ContextIndex index(c, make_context_embedder(c, 256, 3));
  const LtrModel base_only;
  RetrievalArtifacts art{&index, &base_only, {}};
  FusionConfig cfg;
  cfg.mode = FusionMode::kFuseStores;
  cfg.backend = Backend::kLtr;
  const auto fused = federated_retrieve(query_for("p1", "anything"), stores_of(c, "p1"), cfg, art, 7);
  REQUIRE(fused.size() == 7);
  std::set<std::string> winners;
  for (const auto& s : c.stores) winners.insert(s.items[0].id);
  for (const auto& e : fused) {
    CHECK(winners.count(e.item_id) == 1);
    CHECK(e.score == doctest::Approx(1.0 / 61.0).epsilon(1e-12));
  }
}

TEST_CASE("property: disjoint stores, equal within-store rank gives equal fused score") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RankedList> stores;
    for (int s = 0; s < 4; ++s) {
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < 1 + rng() % 4; ++i) ids.push_back("s" + std::to_string(s) + "-" + std::to_string(i));
      stores.push_back(list_in_order(ids));
    }
    const auto fused = rrf_fuse(stores, 60.0, 100);
    for (const auto& a : stores) {
      for (const auto& b : stores) {
        for (std::size_t r = 0; r < std::min(a.size(), b.size()); ++r) {
          CHECK(fused[*fused.rank_of(a[r].item_id) - 1].score == fused[*fused.rank_of(b[r].item_id) - 1].score);
        }
      }
    }
  }
}

TEST_CASE("fuse-stores BM25 equals RRF over per-store BM25 lists") {
  Corpus c;
  c.personas.push_back(ctrag::testing::make_persona("p1"));
  ContextStore cal{"p1", AppId::kCalendar, {}}, notes{"p1", AppId::kNotes, {}};
  cal.items = {make_item("p1-c1", AppId::kCalendar, "Guitar Class", "monday evening"),
               make_item("p1-c2", AppId::kCalendar, "Team Meeting", "quarterly planning"),
               make_item("p1-c3", AppId::kCalendar, "Guitar Recital", "school hall"),
               make_item("p1-c4", AppId::kCalendar, "Dentist", "checkup")};
  notes.items = {make_item("p1-n1", AppId::kNotes, "Guitar Chords", "class notes"),
                 make_item("p1-n2", AppId::kNotes, "Groceries", "milk eggs"),
                 make_item("p1-n3", AppId::kNotes, "Class Schedule", "monday guitar"),
                 make_item("p1-n4", AppId::kNotes, "Books", "to read")};
  c.stores = {cal, notes};
  const ContextIndex index(c, make_context_embedder(c, 256, 3));
  RetrievalArtifacts art{&index, nullptr, {}};
  FusionConfig cfg;
  cfg.backend = Backend::kBm25;
  const LabeledQuery q = query_for("p1", "guitar class on monday");

  auto per_store = [&](const ContextStore& s) {
    std::vector<IndexedDoc> docs;
    for (const auto& item : s.items) docs.push_back({item.id, item_text(item)});
    return bm25_topk(InvertedIndex(docs, content_terms), content_terms(q.text), {}, 10);
  };
  const auto expected = rrf_fuse({per_store(cal), per_store(notes)}, 60.0, 5);
  CHECK(federated_retrieve(q, stores_of(c, "p1"), cfg, art, 5) == expected);

  SUBCASE("fuse-rankers with ltr fuses three pooled rankings") {
    const LtrModel base_only;
    art.ltr_model = &base_only;
    cfg.mode = FusionMode::kFuseRankers;
    cfg.backend = Backend::kLtr;
    const PersonaIndex& pi = index.persona("p1");
    const auto bm25 = bm25_topk(pi.pooled, content_terms(q.text), {}, 100);
    std::vector<EmbeddingCandidate> cands;
    std::vector<RankCandidate> ltr;
    const auto features = extract_group_features(q, pi, index.embedder());
    for (std::size_t i = 0; i < pi.items.size(); ++i) {
      cands.push_back({pi.items[i]->id, &pi.item_embeddings[i]});
      ltr.push_back({pi.items[i]->id, features[i]});
    }
    const auto semantic = cosine_topk(index.embedder().embed(q.id, q.text), cands, 100);
    const auto expected3 = rrf_fuse({bm25, semantic, rank(base_only, ltr)}, 60.0, 6);
    CHECK(federated_retrieve(q, stores_of(c, "p1"), cfg, art, 6) == expected3);

    cfg.backend = Backend::kSemantic;
    CHECK(federated_retrieve(q, stores_of(c, "p1"), cfg, art, 8).ids() == semantic.ids());
  }
  SUBCASE("a subset of stores only returns their items") {
    const std::vector<const ContextStore*> only_notes = {stores_of(c, "p1")[1]};
    for (auto mode : {FusionMode::kFuseStores, FusionMode::kFuseRankers}) {
      cfg.mode = mode;
      for (const auto& e : federated_retrieve(q, only_notes, cfg, art, 8)) CHECK(e.item_id.rfind("p1-n", 0) == 0);
    }
  }
}

TEST_CASE("oracle backend and artifact checks") {
  const Corpus c = ctrag::testing::toy_corpus();
  const ContextIndex index(c, make_context_embedder(c, 256, 3));
  FusionConfig cfg;
  cfg.backend = Backend::kOracle;
  LabeledQuery q = c.queries[0];
  q.gold_context_ids = {"p1-i2", "p1-i1"};
  const auto list = federated_retrieve(q, stores_of(c, "p1"), cfg, {}, 5);
  CHECK(list.ids() == q.gold_context_ids);
  CHECK(recall_at_k(list, {"p1-i1", "p1-i2"}, 2) == 1.0);

  cfg.backend = Backend::kLtr;
  CHECK_THROWS_AS(federated_retrieve(q, stores_of(c, "p1"), cfg, RetrievalArtifacts{&index, nullptr, {}}, 5),
                  ConfigError);
  cfg.backend = Backend::kBm25;
  CHECK_THROWS_AS(federated_retrieve(q, stores_of(c, "p1"), cfg, RetrievalArtifacts{}, 5), ConfigError);
  Corpus other = c;
  other.stores[0].persona_id = "p2";
  CHECK_THROWS_AS(federated_retrieve(q, {&other.stores[0]}, cfg, RetrievalArtifacts{&index, nullptr, {}}, 5),
                  std::invalid_argument);
}

TEST_CASE("name parsing") {
  CHECK(parse_fusion_mode("fuse-stores") == FusionMode::kFuseStores);
  CHECK(parse_fusion_mode("fuse-rankers") == FusionMode::kFuseRankers);
  CHECK_FALSE(parse_fusion_mode("fuse").has_value());
  for (auto b : {Backend::kBm25, Backend::kSemantic, Backend::kLtr, Backend::kOracle}) {
    CHECK(parse_backend(backend_name(b)) == b);
  }
}

TEST_CASE("query augmenters") {
  CHECK(augment_query("when is class", IdentityAugmenter{}) == "when is class");

  Persona p = ctrag::testing::make_persona("p1");
  for (auto& [app, w] : p.app_usage_profile) w = 0.05;
  p.app_usage_profile[AppId::kCalendar] = 0.4;
  p.app_usage_profile[AppId::kReminders] = 0.35;
  const HabitHintAugmenter hint(p);
  CHECK(augment_query("when is class", hint) == "when is class [hint: calendar reminders]");

  // items named after the hinted apps never lose similarity to the augmented query
  Corpus c = ctrag::testing::toy_corpus();
  c.stores[0].items.push_back(make_item("p1-i5", AppId::kCalendar, "Calendar sync", "shared calendar"));
  c.stores[1].items.push_back(make_item("p1-i6", AppId::kNotes, "Reminders backlog", "old reminders list"));
  const auto embedder = make_context_embedder(c, 512, 3);
  for (const auto& q : c.queries) {
    const auto plain = embedder->embed(q.id, q.text);
    const auto augmented = embedder->embed(q.id, augment_query(q.text, hint));
    for (const auto* item : {&c.stores[0].items.back(), &c.stores[1].items.back()}) {
      const auto e = embedder->embed(item->id, item_text(*item));
      CHECK(dot(augmented, e) >= dot(plain, e));
    }
  }
}
