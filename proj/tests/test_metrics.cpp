#include <doctest.h>

#include <random>

#include "ctrag/corpus.hpp"
#include "ctrag/errors.hpp"
#include "ctrag/metrics.hpp"
#include "oracles.hpp"

using namespace ctrag;
using ctrag::oracle::list_in_order;

namespace {

std::unordered_set<std::string> toolbox_names() {
  std::unordered_set<std::string> names;
  for (const auto& t : default_toolbox()) names.insert(t.name);
  return names;
}

}  // namespace

TEST_CASE("recall examples") {
  CHECK(recall_at_k(list_in_order({"a", "c"}), {"a", "b"}, 2) == doctest::Approx(0.5));
  CHECK(recall_at_k(RankedList{}, {"a"}, 3) == 0.0);
  CHECK(recall_at_k(list_in_order({"b", "x", "a"}), {"a", "b"}, 3) == 1.0);
  CHECK_THROWS_AS(recall_at_k(list_in_order({"a"}), {"a"}, 0), std::invalid_argument);
  CHECK_THROWS_AS(recall_at_k(list_in_order({"a"}), {}, 1), std::invalid_argument);
}

TEST_CASE("ndcg examples") {
  RetrievalJudgment j{"q", {"a", "b"}, std::nullopt};
  CHECK(ndcg_at_k(list_in_order({"a", "b", "c"}), j, 3) == doctest::Approx(1.0));
  CHECK(ndcg_at_k(list_in_order({"a", "x", "b"}), j, 3) == doctest::Approx(0.9197207891481876).epsilon(1e-12));
  RetrievalJudgment single{"q", {"a"}, std::nullopt};
  CHECK(ndcg_at_k(list_in_order({"a", "x"}), single, 1) == 1.0);
  RetrievalJudgment none{"q", {}, std::nullopt};
  CHECK(ndcg_at_k(list_in_order({"a"}), none, 3) == 0.0);

  RetrievalJudgment graded{"q", {"a", "b"}, std::map<std::string, int>{{"a", 2}, {"b", 1}, {"c", 0}}};
  CHECK(ndcg_at_k(list_in_order({"a", "b", "c"}), graded, 3) == doctest::Approx(1.0));
  CHECK(ndcg_at_k(list_in_order({"b", "a", "c"}), graded, 3) < 1.0);
}

TEST_CASE("property: metrics agree with brute force over all permutations") {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 400; ++i) worst = std::max(worst, oracle::metric_disagreement(oracle::random_metric_case(rng)));
  CHECK(worst <= 1e-9);
}

TEST_CASE("property: recall non-decreasing in k, metrics bounded") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 300; ++i) {
    const auto c = oracle::random_metric_case(rng);
    const auto j = oracle::judgment_of(c);
    const auto list = list_in_order(c.order);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 7; ++k) {
      const double r = recall_at_k(list, j.gold_ids, k);
      const double n = ndcg_at_k(list, j, k);
      CHECK(r >= prev);
      CHECK(r <= 1.0);
      CHECK(n >= 0.0);
      CHECK(n <= 1.0 + 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("property: ndcg is 1 when the gold set fills the top in any order") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> gold, rest;
    const std::size_t g = 1 + rng() % 4;
    for (std::size_t x = 0; x < g; ++x) gold.push_back("g" + std::to_string(x));
    for (std::size_t x = 0; x < rng() % 4; ++x) rest.push_back("n" + std::to_string(x));
    std::shuffle(gold.begin(), gold.end(), rng);
    auto order = gold;
    order.insert(order.end(), rest.begin(), rest.end());
    RetrievalJudgment j{"q", std::set<std::string>(gold.begin(), gold.end()), std::nullopt};
    const std::size_t k = g + rng() % 3;
    CHECK(ndcg_at_k(list_in_order(order), j, k) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ast_match") {
  const auto names = toolbox_names();
  const Plan gold{"get_event_details", {{"title", "Guitar Class"}}, false};

  auto m = ast_match(gold, gold, names);
  CHECK(m.exact);
  CHECK(m.ast_correct);
  CHECK_FALSE(m.hallucinated);

  m = ast_match(Plan{"get_event_details", {{"title", "Piano Class"}}, false}, gold, names);
  CHECK_FALSE(m.exact);
  CHECK_FALSE(m.ast_correct);

  m = ast_match(Plan{"teleport_user", {}, false}, gold, names);
  CHECK(m.hallucinated);
  CHECK_FALSE(m.ast_correct);

  SUBCASE("normalization makes case and padding irrelevant but not exact") {
    m = ast_match(Plan{" Get_Event_Details", {{"title", " guitar class "}}, false}, gold, names);
    CHECK(m.ast_correct);
    CHECK_FALSE(m.exact);
  }
  SUBCASE("extra arguments") {
    m = ast_match(Plan{"get_event_details", {{"title", "Guitar Class"}, {"date", "x"}}, false}, gold, names);
    CHECK_FALSE(m.ast_correct);
    m = ast_match(Plan{"get_event_details", {{"title", "Guitar Class"}, {"date", ""}}, false}, gold, names);
    CHECK(m.ast_correct);
    CHECK_FALSE(m.exact);
  }
  SUBCASE("default abstains without hallucinating") {
    m = ast_match(Plan{std::string(kDefaultApi), {}, false}, gold, names);
    CHECK_FALSE(m.hallucinated);
    CHECK_FALSE(m.ast_correct);
  }
  SUBCASE("malformed plans") {
    m = ast_match(Plan{"get_event_details", {{"title", "Guitar Class"}}, true}, gold, names);
    CHECK_FALSE(m.ast_correct);
    CHECK_FALSE(m.exact);
    CHECK_FALSE(m.hallucinated);
    m = ast_match(Plan{"warp_drive", {}, true}, gold, names);
    CHECK(m.hallucinated);
    m = ast_match(Plan{"", {}, true}, gold, names);
    CHECK_FALSE(m.hallucinated);
  }
}

TEST_CASE("property: exact implies correct, hallucinated implies incorrect") {
  const auto names = toolbox_names();
  const std::vector<std::string> apis = {"read_note", "create_note", "teleport_user", "default", "READ_NOTE"};
  const std::vector<std::string> values = {"", "Plan", "plan ", "Other"};
  std::mt19937_64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    auto random_plan = [&] {
      Plan p{apis[rng() % apis.size()], {}, rng() % 10 == 0};
      if (rng() % 2) p.args["title"] = values[rng() % values.size()];
      if (rng() % 3 == 0) p.args["content"] = values[rng() % values.size()];
      return p;
    };
    Plan gold = random_plan();
    gold.malformed = false;
    const auto m = ast_match(random_plan(), gold, names);
    if (m.exact) CHECK(m.ast_correct);
    if (m.hallucinated) CHECK_FALSE(m.ast_correct);
  }
}

TEST_CASE("aggregate") {
  CHECK_THROWS_AS(aggregate({}), ReportError);

  std::vector<EvalRecord> records(4);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].query_id = "q" + std::to_string(i);
    records[i].plan = AstMatch{i != 3, i != 3, false};
    records[i].context_recall[5] = i < 2 ? 1.0 : 0.0;
  }
  auto r = aggregate(records);
  CHECK(r.n_queries == 4);
  CHECK(round2(*r.plan_accuracy) == 75.0);
  CHECK(round2(*r.hallucination) == 0.0);
  CHECK(r.context_recall.at(5) == doctest::Approx(50.0));
  CHECK(r.tool_recall.empty());

  for (auto& rec : records) rec.plan = AstMatch{true, true, false};
  r = aggregate(records);
  CHECK(*r.plan_accuracy == 100.0);
  CHECK(*r.exact_match == 100.0);

  CHECK(round2(100.0 / 3.0) == 33.33);
  CHECK(round2(200.0 / 3.0) == 66.67);
}
