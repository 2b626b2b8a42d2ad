#include "ctrag/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "ctrag/errors.hpp"

namespace ctrag {

double dcg_at_k(const std::vector<int>& rel, std::size_t k) {
  double dcg = 0.0;
  const std::size_t n = std::min(k, rel.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (rel[i] > 0) dcg += (std::exp2(rel[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

double ideal_dcg_at_k(std::vector<int> rel, std::size_t k) {
  std::sort(rel.begin(), rel.end(), std::greater<>());
  return dcg_at_k(rel, k);
}

int RetrievalJudgment::relevance(const std::string& id) const {
  if (graded) {
    auto it = graded->find(id);
    return it == graded->end() ? 0 : it->second;
  }
  return gold_ids.count(id) ? 1 : 0;
}

double recall_at_k(const RankedList& ranked, const std::set<std::string>& gold, std::size_t k) {
  if (k == 0) throw std::invalid_argument("recall_at_k: k must be >= 1");
  if (gold.empty()) throw std::invalid_argument("recall_at_k: gold set is empty");
  std::size_t hits = 0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t i = 0; i < n; ++i) hits += gold.count(ranked[i].item_id);
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double ndcg_at_k(const RankedList& ranked, const RetrievalJudgment& judgment, std::size_t k) {
  if (k == 0) throw std::invalid_argument("ndcg_at_k: k must be >= 1");
  std::vector<int> ranked_rel;
  ranked_rel.reserve(std::min(k, ranked.size()));
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    ranked_rel.push_back(judgment.relevance(ranked[i].item_id));
  }
  std::vector<int> all_rel;
  if (judgment.graded) {
    for (const auto& [id, g] : *judgment.graded) all_rel.push_back(g);
  } else {
    all_rel.assign(judgment.gold_ids.size(), 1);
  }
  const double ideal = ideal_dcg_at_k(std::move(all_rel), k);
  if (ideal <= 0.0) return 0.0;
  return dcg_at_k(ranked_rel, k) / ideal;
}

namespace {

std::string normalize_value(const std::string& v) {
  const auto first = v.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = v.find_last_not_of(" \t\r\n");
  std::string out = v.substr(first, last - first + 1);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Plan normalize_plan(const Plan& plan) {
  Plan out;
  out.api = normalize_value(plan.api);
  for (const auto& [k, v] : plan.args) out.args[k] = normalize_value(v);
  return out;
}

}  // namespace

AstMatch ast_match(const Plan& predicted, const Plan& gold, const std::unordered_set<std::string>& toolbox_names) {
  AstMatch m;
  const Plan pred = normalize_plan(predicted);
  const Plan ref = normalize_plan(gold);
  m.hallucinated = !pred.api.empty() && pred.api != kDefaultApi && !toolbox_names.count(pred.api);
  if (predicted.malformed) return m;

  bool args_ok = true;
  for (const auto& [key, value] : ref.args) {
    auto it = pred.args.find(key);
    if (it == pred.args.end() || it->second != value) {
      args_ok = false;
      break;
    }
  }
  for (const auto& [key, value] : pred.args) {
    if (!ref.args.count(key) && !value.empty()) {
      args_ok = false;
      break;
    }
  }
  m.ast_correct = !m.hallucinated && pred.api == ref.api && args_ok;
  m.exact = m.ast_correct && canonical_plan_string(predicted) == canonical_plan_string(gold);
  return m;
}

double round2(double percent) { return std::round(percent * 100.0) / 100.0; }

EvalReport aggregate(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw ReportError("cannot aggregate an empty record set");
  EvalReport report;
  report.n_queries = records.size();
  auto mean_by_k = [&](auto member) {
    std::map<std::size_t, double> sums;
    std::map<std::size_t, std::size_t> counts;
    for (const auto& r : records) {
      for (const auto& [k, v] : r.*member) {
        sums[k] += v;
        ++counts[k];
      }
    }
    for (auto& [k, s] : sums) s = 100.0 * s / static_cast<double>(counts[k]);
    return sums;
  };
  report.context_recall = mean_by_k(&EvalRecord::context_recall);
  report.context_ndcg = mean_by_k(&EvalRecord::context_ndcg);
  report.tool_recall = mean_by_k(&EvalRecord::tool_recall);

  std::size_t planned = 0, correct = 0, exact = 0, hallucinated = 0;
  for (const auto& r : records) {
    if (!r.plan) continue;
    ++planned;
    correct += r.plan->ast_correct;
    exact += r.plan->exact;
    hallucinated += r.plan->hallucinated;
  }
  if (planned > 0) {
    const double n = static_cast<double>(planned);
    report.plan_accuracy = 100.0 * static_cast<double>(correct) / n;
    report.exact_match = 100.0 * static_cast<double>(exact) / n;
    report.hallucination = 100.0 * static_cast<double>(hallucinated) / n;
  }
  return report;
}

}  // namespace ctrag
