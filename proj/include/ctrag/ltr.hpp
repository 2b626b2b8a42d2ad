#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctrag/context_index.hpp"
#include "ctrag/corpus.hpp"
#include "ctrag/ranked_list.hpp"

namespace ctrag {

inline constexpr std::size_t kNumFeatures = 13;
using FeatureVector = std::array<double, kNumFeatures>;

/// Feature names in storage order; saved with every model.
const std::vector<std::string>& feature_schema();
std::string schema_hash(const std::vector<std::string>& schema);

enum FeatureIndex : std::size_t {
  kBm25Score = 0,
  kCosineSim,
  kAccessCountLog,
  kRecencyDays,
  kHourOfDayMatch,
  kAppUsageWeight,
  kAppOneHot,  // first of seven, AppId order
};

/// Features for one (query, item) pair. Throws std::invalid_argument if the item is not
/// one of the query persona's items.
FeatureVector extract_features(const LabeledQuery& query, const ContextItem& item, const Persona& persona,
                               const PersonaIndex& index, const Embedder& embedder);

/// Features for every pooled item of the persona, aligned with `index.items`. Same values
/// as calling extract_features per item, computed with one BM25 pass.
std::vector<FeatureVector> extract_group_features(const LabeledQuery& query, const PersonaIndex& index,
                                                  const Embedder& embedder);

struct GroupRow {
  std::string item_id;
  FeatureVector features{};
  int relevance = 0;
};

struct QueryGroup {
  std::string query_id;
  std::vector<GroupRow> rows;
};

/// Binary-labelled group over all of the query persona's items.
QueryGroup build_query_group(const LabeledQuery& query, const ContextIndex& index);

struct Gradients {
  std::vector<double> lambdas;
  std::vector<double> hessians;
};

/// LambdaRank forces for one group. Positions come from `scores` with ties broken by
/// ascending item id; discounts beyond `ndcg_cutoff` are zero.
Gradients lambda_gradients(const QueryGroup& group, const std::vector<double>& scores, double sigma,
                           std::size_t ndcg_cutoff);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Binary regression tree; node 0 is the root. Rows go left iff x[feature] <= threshold.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const FeatureVector& x) const;
  std::size_t leaf_count() const;
  bool operator==(const RegressionTree&) const = default;
};

struct TreeRow {
  FeatureVector features{};
  double target = 0.0;
  double hessian = 1.0;
};

/// Best-first growth on squared-error reduction of the targets; leaves take the Newton
/// step sum(target) / (sum(hessian) + 1e-9) clipped to [-10, 10].
/// Throws std::invalid_argument on empty input or max_leaves < 1.
RegressionTree fit_tree(const std::vector<TreeRow>& rows, std::size_t max_leaves, std::size_t min_samples_leaf);

/// Reusable tree grower: sorts every feature column once so repeated fits over the same
/// rows (one per boosting round) skip the sort.
class TreeLearner {
 public:
  explicit TreeLearner(std::vector<FeatureVector> rows);

  /// Same contract as fit_tree. When `fitted` is non-null it receives each row's leaf value.
  RegressionTree fit(const std::vector<double>& targets, const std::vector<double>& hessians,
                     std::size_t max_leaves, std::size_t min_samples_leaf,
                     std::vector<double>* fitted = nullptr) const;

  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<FeatureVector> rows_;
  std::vector<std::vector<std::uint32_t>> sorted_;  // per feature, row ids by ascending value
};

struct LtrModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;
  double sigma = 1.0;
  std::vector<std::string> feature_schema = ctrag::feature_schema();

  double predict(const FeatureVector& x) const;
  bool operator==(const LtrModel&) const = default;
};

std::vector<double> predict(const LtrModel& model, const std::vector<FeatureVector>& rows);

struct RankCandidate {
  std::string item_id;
  FeatureVector features{};
};

RankedList rank(const LtrModel& model, const std::vector<RankCandidate>& candidates);

struct TrainConfig {
  std::size_t n_trees = 300;
  double learning_rate = 0.1;
  double sigma = 1.0;
  std::size_t max_leaves = 31;
  std::size_t min_samples_leaf = 0;  // 0 picks max(20, 1% of training rows)
  std::size_t ndcg_cutoff = 10;
  double base_score = 0.0;
  std::uint64_t seed = 7;
  int threads = 1;
};

struct TrainResult {
  LtrModel model;
  // round_ndcg[r] is the mean train NDCG@cutoff of the ensemble before tree r+1 is added.
  std::vector<double> round_ndcg;
  double final_ndcg = 0.0;
  std::size_t trained_groups = 0;
  std::size_t trained_rows = 0;
};

/// Throws ConfigError on invalid settings and TrainingError when no group has a
/// relevance-ordered pair.
TrainResult train(const std::vector<QueryGroup>& groups, const TrainConfig& config);

/// NDCG@cutoff of one group ranked by `scores` (ties by ascending item id).
double group_ndcg(const QueryGroup& group, const std::vector<double>& scores, std::size_t cutoff);

/// Mean NDCG@cutoff of `scores` over groups with at least one relevant row.
double mean_group_ndcg(const std::vector<QueryGroup>& groups, const std::vector<std::vector<double>>& scores,
                       std::size_t cutoff);

void save_model(const LtrModel& model, const std::filesystem::path& path);
/// Throws ParseError on malformed content and ModelLoadError when the stored schema does
/// not match `expected_schema`.
LtrModel load_model(const std::filesystem::path& path,
                    const std::vector<std::string>& expected_schema = feature_schema());

/// "round,mean_train_ndcg" rows, one per boosting round plus a final row.
std::string training_log_csv(const TrainResult& result);

}  // namespace ctrag
