#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ctrag/errors.hpp"
#include "ctrag/ltr.hpp"
#include "ctrag/metrics.hpp"

namespace ctrag {

namespace {

// 1-based rank of every row under the canonical score order.
std::vector<std::size_t> positions(const QueryGroup& group, const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return group.rows[a].item_id < group.rows[b].item_id;
  });
  std::vector<std::size_t> pos(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) pos[order[r]] = r + 1;
  return pos;
}

std::vector<int> relevances(const QueryGroup& group) {
  std::vector<int> rel;
  rel.reserve(group.rows.size());
  for (const auto& row : group.rows) rel.push_back(row.relevance);
  return rel;
}

}  // namespace

Gradients lambda_gradients(const QueryGroup& group, const std::vector<double>& scores, double sigma,
                           std::size_t ndcg_cutoff) {
  const std::size_t n = group.rows.size();
  if (scores.size() != n) throw std::invalid_argument("lambda_gradients: scores not aligned with rows");
  Gradients g{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double idcg = ideal_dcg_at_k(relevances(group), ndcg_cutoff);
  if (idcg <= 0.0) return g;

  const auto pos = positions(group, scores);
  auto discount = [&](std::size_t p) { return p <= ndcg_cutoff ? 1.0 / std::log2(1.0 + static_cast<double>(p)) : 0.0; };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const int ri = group.rows[i].relevance;
      const int rj = group.rows[j].relevance;
      if (ri <= rj) continue;
      const double delta =
          std::abs((std::exp2(ri) - std::exp2(rj)) * (discount(pos[i]) - discount(pos[j]))) / idcg;
      const double rho = 1.0 / (1.0 + std::exp(sigma * (scores[i] - scores[j])));
      const double force = sigma * rho * delta;
      g.lambdas[i] += force;
      g.lambdas[j] -= force;
      const double h = sigma * sigma * rho * (1.0 - rho) * delta;
      g.hessians[i] += h;
      g.hessians[j] += h;
    }
  }
  return g;
}

double group_ndcg(const QueryGroup& group, const std::vector<double>& scores, std::size_t cutoff) {
  const auto pos = positions(group, scores);
  std::vector<int> ranked(group.rows.size());
  for (std::size_t i = 0; i < group.rows.size(); ++i) ranked[pos[i] - 1] = group.rows[i].relevance;
  const double idcg = ideal_dcg_at_k(relevances(group), cutoff);
  return idcg > 0.0 ? dcg_at_k(ranked, cutoff) / idcg : 0.0;
}

double mean_group_ndcg(const std::vector<QueryGroup>& groups, const std::vector<std::vector<double>>& scores,
                       std::size_t cutoff) {
  if (groups.size() != scores.size()) throw std::invalid_argument("mean_group_ndcg: scores not aligned");
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (ideal_dcg_at_k(relevances(groups[g]), cutoff) <= 0.0) continue;
    sum += group_ndcg(groups[g], scores[g], cutoff);
    ++counted;
  }
  return counted ? sum / static_cast<double>(counted) : 0.0;
}

}  // namespace ctrag
