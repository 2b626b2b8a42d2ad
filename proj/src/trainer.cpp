#include <algorithm>
#include <cmath>

#include "ctrag/errors.hpp"
#include "ctrag/ltr.hpp"
#include "ctrag/metrics.hpp"
#include "ctrag/parallel.hpp"

namespace ctrag {

namespace {

void validate(const TrainConfig& c) {
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) throw ConfigError("learning_rate must be > 0");
  if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) throw ConfigError("sigma must be > 0");
  if (c.max_leaves < 1) throw ConfigError("max_leaves must be >= 1");
  if (c.ndcg_cutoff < 1) throw ConfigError("ndcg_cutoff must be >= 1");
  if (!std::isfinite(c.base_score)) throw ConfigError("base_score must be finite");
}

bool trainable(const QueryGroup& g) {
  if (g.rows.size() < 2) return false;
  int lo = g.rows.front().relevance, hi = lo;
  for (const auto& r : g.rows) {
    if (r.relevance < 0) throw TrainingError("negative relevance in group " + g.query_id);
    lo = std::min(lo, r.relevance);
    hi = std::max(hi, r.relevance);
  }
  return hi > 0 && hi > lo;
}

}  // namespace

TrainResult train(const std::vector<QueryGroup>& groups, const TrainConfig& config) {
  validate(config);
  std::vector<const QueryGroup*> used;
  for (const auto& g : groups) {
    if (trainable(g)) used.push_back(&g);
  }
  if (used.empty()) throw TrainingError("no query group has a pair of rows with different relevance");

  std::vector<std::size_t> offset(used.size() + 1, 0);
  std::vector<FeatureVector> features;
  for (std::size_t g = 0; g < used.size(); ++g) {
    offset[g + 1] = offset[g] + used[g]->rows.size();
    for (const auto& row : used[g]->rows) {
      for (double v : row.features) {
        if (!std::isfinite(v)) throw TrainingError("non-finite feature in group " + used[g]->query_id);
      }
      features.push_back(row.features);
    }
  }
  const std::size_t n_rows = features.size();
  const std::size_t min_leaf =
      config.min_samples_leaf > 0 ? config.min_samples_leaf : std::max<std::size_t>(20, n_rows / 100);

  TrainResult result;
  result.trained_groups = used.size();
  result.trained_rows = n_rows;
  result.model.learning_rate = config.learning_rate;
  result.model.sigma = config.sigma;
  result.model.base_score = config.base_score;

  std::vector<double> scores(n_rows, config.base_score);
  std::vector<double> targets(n_rows), hessians(n_rows), group_ndcg_values(used.size());
  auto group_scores = [&](std::size_t g) {
    return std::vector<double>(scores.begin() + static_cast<std::ptrdiff_t>(offset[g]),
                               scores.begin() + static_cast<std::ptrdiff_t>(offset[g + 1]));
  };
  auto mean_ndcg = [&] {
    parallel_for(used.size(), config.threads,
                 [&](std::size_t g) { group_ndcg_values[g] = group_ndcg(*used[g], group_scores(g), config.ndcg_cutoff); });
    double sum = 0.0;
    for (double v : group_ndcg_values) sum += v;
    return sum / static_cast<double>(used.size());
  };

  const TreeLearner learner(std::move(features));
  std::vector<double> fitted;
  for (std::size_t round = 0; round < config.n_trees; ++round) {
    parallel_for(used.size(), config.threads, [&](std::size_t g) {
      const auto s = group_scores(g);
      const Gradients grad = lambda_gradients(*used[g], s, config.sigma, config.ndcg_cutoff);
      std::copy(grad.lambdas.begin(), grad.lambdas.end(), targets.begin() + static_cast<std::ptrdiff_t>(offset[g]));
      std::copy(grad.hessians.begin(), grad.hessians.end(), hessians.begin() + static_cast<std::ptrdiff_t>(offset[g]));
      group_ndcg_values[g] = group_ndcg(*used[g], s, config.ndcg_cutoff);
    });
    double sum = 0.0;
    for (double v : group_ndcg_values) sum += v;
    result.round_ndcg.push_back(sum / static_cast<double>(used.size()));

    result.model.trees.push_back(learner.fit(targets, hessians, config.max_leaves, min_leaf, &fitted));
    for (std::size_t i = 0; i < n_rows; ++i) scores[i] += config.learning_rate * fitted[i];
  }
  result.final_ndcg = mean_ndcg();
  return result;
}

}  // namespace ctrag
