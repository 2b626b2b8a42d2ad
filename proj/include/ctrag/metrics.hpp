#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "ctrag/corpus.hpp"
#include "ctrag/ranked_list.hpp"

namespace ctrag {

/// DCG over gains `2^rel - 1` with discount `1/log2(rank+1)`, first `k` ranks.
double dcg_at_k(const std::vector<int>& relevance_in_rank_order, std::size_t k);
/// DCG of the relevance multiset sorted descending.
double ideal_dcg_at_k(std::vector<int> relevance, std::size_t k);

struct RetrievalJudgment {
  std::string query_id;
  std::set<std::string> gold_ids;
  // Graded labels; when absent every gold id has grade 1 and everything else 0.
  std::optional<std::map<std::string, int>> graded;

  int relevance(const std::string& id) const;
};

/// |top-k ∩ gold| / |gold|. Throws std::invalid_argument on k == 0 or empty gold.
double recall_at_k(const RankedList& ranked, const std::set<std::string>& gold, std::size_t k);

/// DCG@k / IDCG@k over the judgment's labels; 0 when IDCG is 0.
double ndcg_at_k(const RankedList& ranked, const RetrievalJudgment& judgment, std::size_t k);

struct AstMatch {
  bool exact = false;
  bool ast_correct = false;
  bool hallucinated = false;
};

/// Structural plan comparison. `default` is the planner's abstain api and never counts as
/// hallucinated.
AstMatch ast_match(const Plan& predicted, const Plan& gold, const std::unordered_set<std::string>& toolbox_names);

inline constexpr std::string_view kDefaultApi = "default";

/// Per-query measurements. Stages that did not run stay empty.
struct EvalRecord {
  std::string query_id;
  std::map<std::size_t, double> context_recall;
  std::map<std::size_t, double> context_ndcg;
  std::map<std::size_t, double> tool_recall;
  std::optional<AstMatch> plan;
};

/// Means over queries in percent. Keys are the K values that were measured.
struct EvalReport {
  std::size_t n_queries = 0;
  std::map<std::size_t, double> context_recall;
  std::map<std::size_t, double> context_ndcg;
  std::map<std::size_t, double> tool_recall;
  std::optional<double> plan_accuracy;
  std::optional<double> exact_match;
  std::optional<double> hallucination;
};

/// Throws ReportError on an empty record set.
EvalReport aggregate(const std::vector<EvalRecord>& records);

/// Percent value rounded half-away-from-zero to two decimals.
double round2(double percent);

}  // namespace ctrag
