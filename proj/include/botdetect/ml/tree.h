#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/common/random.h"
#include "botdetect/ml/matrix.h"

namespace botdetect::ml {

enum class Criterion { kGini, kSquaredError };

struct TreeParams {
  Criterion criterion = Criterion::kGini;
  std::size_t max_depth = 0;      // 0 = unlimited
  std::size_t max_features = 0;   // candidates per split; 0 = all
  double min_split_weight = 2.0;  // nodes lighter than this become leaves
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] <= threshold
  int right = -1;
  // Leaf payload: class distribution (Gini) or a single value (regression).
  std::vector<double> value;

  bool leaf() const { return feature < 0; }
};

// Targets for tree growth. Classification uses `classes` with `n_classes`;
// regression uses `values`.
struct TreeTargets {
  std::span<const int> classes;
  std::size_t n_classes = 0;
  std::span<const double> values;
};

// CART with weighted samples. Rows with zero weight are ignored. Among the
// candidate features the split with the largest weighted impurity decrease
// wins (ties: earlier candidate, then lower threshold). When none of the
// first `max_features` candidates admits a split, the remaining features are
// tried in the same random order until one does.
class DecisionTree {
 public:
  static DecisionTree fit(const Matrix& x, const TreeTargets& y,
                          std::span<const double> weights, const TreeParams& params,
                          Rng* rng);

  // Index of the leaf reached by a row.
  int apply(std::span<const double> row) const;
  const std::vector<double>& predict(std::span<const double> row) const {
    return nodes_[static_cast<std::size_t>(apply(row))].value;
  }

  std::vector<TreeNode>& nodes() { return nodes_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace botdetect::ml
