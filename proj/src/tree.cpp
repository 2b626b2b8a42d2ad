#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ctrag/ltr.hpp"

namespace ctrag {

double RegressionTree::predict(const FeatureVector& x) const {
  if (nodes.empty()) return 0.0;
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

constexpr double kHessianGuard = 1e-9;
constexpr double kLeafClip = 10.0;
constexpr double kMinGain = 1e-12;

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  std::size_t n_left = 0;
};

struct Leaf {
  std::size_t begin = 0, end = 0;
  int node = 0;
  double sum_t = 0.0, sum_h = 0.0;
  SplitChoice best;
};

double leaf_value(double sum_t, double sum_h) {
  return std::clamp(sum_t / (sum_h + kHessianGuard), -kLeafClip, kLeafClip);
}

void renumber_preorder(const std::vector<TreeNode>& in, int node, std::vector<TreeNode>& out) {
  const std::size_t at = out.size();
  out.push_back(in[static_cast<std::size_t>(node)]);
  if (out[at].is_leaf()) return;
  const int left = in[static_cast<std::size_t>(node)].left;
  const int right = in[static_cast<std::size_t>(node)].right;
  out[at].left = static_cast<int>(out.size());
  renumber_preorder(in, left, out);
  out[at].right = static_cast<int>(out.size());
  renumber_preorder(in, right, out);
}

}  // namespace

TreeLearner::TreeLearner(std::vector<FeatureVector> rows) : rows_(std::move(rows)), sorted_(kNumFeatures) {
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    auto& order = sorted_[f];
    order.resize(rows_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return rows_[a][f] < rows_[b][f]; });
  }
}

RegressionTree TreeLearner::fit(const std::vector<double>& targets, const std::vector<double>& hessians,
                                std::size_t max_leaves, std::size_t min_samples_leaf,
                                std::vector<double>* fitted) const {
  const std::size_t n = rows_.size();
  if (n == 0) throw std::invalid_argument("fit_tree: no rows");
  if (targets.size() != n || hessians.size() != n) throw std::invalid_argument("fit_tree: targets not aligned");
  if (max_leaves < 1) throw std::invalid_argument("fit_tree: max_leaves must be >= 1");
  const std::size_t min_leaf = std::max<std::size_t>(min_samples_leaf, 1);

  std::vector<std::vector<std::uint32_t>> work = sorted_;
  std::vector<std::uint32_t> scratch(n);
  std::vector<char> goes_left(n, 0);
  std::vector<TreeNode> nodes(1);

  auto find_split = [&](Leaf& leaf) {
    leaf.best = SplitChoice{};
    const std::size_t count = leaf.end - leaf.begin;
    if (count < 2 * min_leaf) return;
    const double total = leaf.sum_t;
    const double parent = total * total / static_cast<double>(count);
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      const auto& order = work[f];
      double left_sum = 0.0;
      for (std::size_t i = leaf.begin; i + 1 < leaf.end; ++i) {
        left_sum += targets[order[i]];
        const std::size_t nl = i - leaf.begin + 1;
        const std::size_t nr = count - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double v = rows_[order[i]][f];
        const double next = rows_[order[i + 1]][f];
        if (!(v < next)) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - parent;
        if (gain > leaf.best.gain + kMinGain) {
          double threshold = v + (next - v) / 2.0;
          if (!(threshold >= v && threshold < next)) threshold = v;
          leaf.best = SplitChoice{gain, static_cast<int>(f), threshold, nl};
        }
      }
    }
  };

  Leaf root{0, n, 0, 0.0, 0.0, {}};
  for (std::size_t i = 0; i < n; ++i) {
    root.sum_t += targets[i];
    root.sum_h += hessians[i];
  }
  find_split(root);
  std::vector<Leaf> leaves{root};

  while (leaves.size() < max_leaves) {
    std::size_t pick = leaves.size();
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      if (leaves[l].best.feature < 0) continue;
      if (pick == leaves.size() || leaves[l].best.gain > leaves[pick].best.gain) pick = l;
    }
    if (pick == leaves.size()) break;
    Leaf parent = leaves[pick];
    const SplitChoice split = parent.best;
    const std::size_t mid = parent.begin + split.n_left;
    const auto& chosen = work[static_cast<std::size_t>(split.feature)];
    for (std::size_t i = parent.begin; i < parent.end; ++i) goes_left[chosen[i]] = i < mid;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (static_cast<int>(f) == split.feature) continue;
      auto& order = work[f];
      std::size_t l = parent.begin, r = 0;
      for (std::size_t i = parent.begin; i < parent.end; ++i) {
        const std::uint32_t row = order[i];
        if (goes_left[row]) order[l++] = row;
        else scratch[r++] = row;
      }
      std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(r), order.begin() + static_cast<std::ptrdiff_t>(l));
    }

    Leaf left{parent.begin, mid, static_cast<int>(nodes.size()), 0.0, 0.0, {}};
    Leaf right{mid, parent.end, static_cast<int>(nodes.size() + 1), 0.0, 0.0, {}};
    for (std::size_t i = left.begin; i < left.end; ++i) {
      left.sum_t += targets[chosen[i]];
      left.sum_h += hessians[chosen[i]];
    }
    for (std::size_t i = right.begin; i < right.end; ++i) {
      right.sum_t += targets[chosen[i]];
      right.sum_h += hessians[chosen[i]];
    }

    auto& pn = nodes[static_cast<std::size_t>(parent.node)];
    pn.feature = split.feature;
    pn.threshold = split.threshold;
    pn.left = left.node;
    pn.right = right.node;
    nodes.emplace_back();
    nodes.emplace_back();

    find_split(left);
    find_split(right);
    leaves[pick] = left;
    leaves.push_back(right);
  }

  for (const auto& leaf : leaves) {
    const double value = leaf_value(leaf.sum_t, leaf.sum_h);
    nodes[static_cast<std::size_t>(leaf.node)].value = value;
    if (fitted) {
      fitted->resize(n);
      for (std::size_t i = leaf.begin; i < leaf.end; ++i) (*fitted)[work[0][i]] = value;
    }
  }

  RegressionTree tree;
  renumber_preorder(nodes, 0, tree.nodes);
  return tree;
}

RegressionTree fit_tree(const std::vector<TreeRow>& rows, std::size_t max_leaves, std::size_t min_samples_leaf) {
  std::vector<FeatureVector> features;
  std::vector<double> targets, hessians;
  features.reserve(rows.size());
  for (const auto& r : rows) {
    features.push_back(r.features);
    targets.push_back(r.target);
    hessians.push_back(r.hessian);
  }
  return TreeLearner(std::move(features)).fit(targets, hessians, max_leaves, min_samples_leaf);
}

}  // namespace ctrag
