#include "botdetect/ml/tree.h"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace botdetect::ml {
namespace {

struct Work {
  int node;
  std::vector<std::uint32_t> rows;
  std::size_t depth;
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

class Grower {
 public:
  Grower(const Matrix& x, const TreeTargets& y, std::span<const double> w,
         const TreeParams& params, Rng* rng)
      : x_(x), y_(y), w_(w), params_(params), rng_(rng),
        gini_(params.criterion == Criterion::kGini) {}

  std::vector<TreeNode> grow() {
    std::vector<std::uint32_t> root;
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] > 0.0) root.push_back(static_cast<std::uint32_t>(i));
    if (root.empty()) throw std::invalid_argument("tree: no rows with positive weight");
    nodes_.emplace_back();
    std::vector<Work> stack;
    stack.push_back({0, std::move(root), 0});
    while (!stack.empty()) {
      Work work = std::move(stack.back());
      stack.pop_back();
      auto [left, right] = expand(work);
      // Right is pushed first so the left subtree is built first.
      if (!right.rows.empty()) stack.push_back(std::move(right));
      if (!left.rows.empty()) stack.push_back(std::move(left));
    }
    return std::move(nodes_);
  }

 private:
  std::pair<Work, Work> expand(const Work& work) {
    const auto& rows = work.rows;
    double total = 0.0;
    std::vector<double> cls(gini_ ? y_.n_classes : 0, 0.0);
    double sy = 0.0, syy = 0.0;
    for (auto r : rows) {
      const double wr = w_[r];
      total += wr;
      if (gini_) {
        cls[static_cast<std::size_t>(y_.classes[r])] += wr;
      } else {
        sy += wr * y_.values[r];
        syy += wr * y_.values[r] * y_.values[r];
      }
    }
    TreeNode& node = nodes_[static_cast<std::size_t>(work.node)];
    if (gini_) {
      node.value.resize(cls.size());
      for (std::size_t c = 0; c < cls.size(); ++c) node.value[c] = cls[c] / total;
    } else {
      node.value = {sy / total};
    }

    bool pure;
    if (gini_) {
      pure = std::count_if(cls.begin(), cls.end(), [](double v) { return v > 0.0; }) <= 1;
    } else {
      const double first = y_.values[rows.front()];
      pure = std::all_of(rows.begin(), rows.end(),
                         [&](std::uint32_t r) { return y_.values[r] == first; });
    }
    if (pure || total < params_.min_split_weight || rows.size() < 2 ||
        (params_.max_depth > 0 && work.depth >= params_.max_depth))
      return {};

    const Split split = best_split(rows, cls, sy);
    if (split.feature < 0) return {};

    Work left{static_cast<int>(nodes_.size()), {}, work.depth + 1};
    Work right{static_cast<int>(nodes_.size() + 1), {}, work.depth + 1};
    for (auto r : rows)
      (x_(r, split.feature) <= split.threshold ? left : right).rows.push_back(r);
    TreeNode& parent = nodes_[static_cast<std::size_t>(work.node)];
    parent.feature = split.feature;
    parent.threshold = split.threshold;
    parent.left = left.node;
    parent.right = right.node;
    nodes_.emplace_back();
    nodes_.emplace_back();
    return {std::move(left), std::move(right)};
  }

  Split best_split(const std::vector<std::uint32_t>& rows,
                   const std::vector<double>& cls_total, double sy_total) {
    const auto d = static_cast<std::size_t>(x_.cols());
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::size_t budget = d;
    if (params_.max_features > 0 && params_.max_features < d) {
      if (!rng_) throw std::invalid_argument("tree: feature sampling needs an rng");
      rng_->shuffle(order);
      budget = params_.max_features;
    }
    Split best;
    std::size_t evaluated = 0;
    for (std::size_t f : order) {
      if (evaluated >= budget && best.feature >= 0) break;
      if (evaluate(rows, f, cls_total, sy_total, best)) ++evaluated;
    }
    return best;
  }

  // Returns false when the feature is constant within the node.
  bool evaluate(const std::vector<std::uint32_t>& rows, std::size_t f,
                const std::vector<double>& cls_total, double sy_total, Split& best) {
    const auto fi = static_cast<Eigen::Index>(f);
    buf_.clear();
    for (auto r : rows) buf_.emplace_back(x_(r, fi), r);
    std::sort(buf_.begin(), buf_.end());
    if (buf_.front().first == buf_.back().first) return false;

    double wl = 0.0;
    double total = 0.0;
    for (const auto& [v, r] : buf_) total += w_[r];
    std::vector<double> left(cls_total.size(), 0.0);
    double syl = 0.0;
    for (std::size_t i = 0; i + 1 < buf_.size(); ++i) {
      const auto r = buf_[i].second;
      wl += w_[r];
      if (gini_)
        left[static_cast<std::size_t>(y_.classes[r])] += w_[r];
      else
        syl += w_[r] * y_.values[r];
      const double a = buf_[i].first;
      const double b = buf_[i + 1].first;
      if (a == b) continue;
      const double wr = total - wl;
      if (wl <= 0.0 || wr <= 0.0) continue;
      double score;
      if (gini_) {
        double sl = 0.0, sr = 0.0;
        for (std::size_t c = 0; c < left.size(); ++c) {
          sl += left[c] * left[c];
          const double rc = cls_total[c] - left[c];
          sr += rc * rc;
        }
        score = sl / wl + sr / wr;
      } else {
        const double syr = sy_total - syl;
        score = syl * syl / wl + syr * syr / wr;
      }
      if (score > best.score) {
        double t = a + (b - a) / 2.0;
        if (!(t < b)) t = a;
        best = {static_cast<int>(f), t, score};
      }
    }
    return true;
  }

  const Matrix& x_;
  const TreeTargets& y_;
  std::span<const double> w_;
  const TreeParams& params_;
  Rng* rng_;
  bool gini_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, std::uint32_t>> buf_;
};

std::size_t depth_of(const std::vector<TreeNode>& nodes, int i) {
  const TreeNode& n = nodes[static_cast<std::size_t>(i)];
  if (n.leaf()) return 0;
  return 1 + std::max(depth_of(nodes, n.left), depth_of(nodes, n.right));
}

}  // namespace

DecisionTree DecisionTree::fit(const Matrix& x, const TreeTargets& y,
                               std::span<const double> weights, const TreeParams& params,
                               Rng* rng) {
  if (weights.size() != static_cast<std::size_t>(x.rows()))
    throw std::invalid_argument("tree: weight count mismatch");
  if (params.criterion == Criterion::kGini) {
    if (y.classes.size() != weights.size() || y.n_classes == 0)
      throw std::invalid_argument("tree: class targets mismatch");
  } else if (y.values.size() != weights.size()) {
    throw std::invalid_argument("tree: regression targets mismatch");
  }
  DecisionTree t;
  t.nodes_ = Grower(x, y, weights, params, rng).grow();
  return t;
}

int DecisionTree::apply(std::span<const double> row) const {
  int i = 0;
  while (!nodes_[static_cast<std::size_t>(i)].leaf()) {
    const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return i;
}

std::size_t DecisionTree::depth() const { return nodes_.empty() ? 0 : depth_of(nodes_, 0); }

nlohmann::json DecisionTree::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& n : nodes_) {
    if (n.leaf())
      out.push_back({{"v", n.value}});
    else
      out.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}});
  }
  return out;
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  DecisionTree t;
  for (const auto& n : j) {
    TreeNode node;
    if (n.contains("v")) {
      node.value = n.at("v").get<std::vector<double>>();
    } else {
      node.feature = n.at("f").get<int>();
      node.threshold = n.at("t").get<double>();
      node.left = n.at("l").get<int>();
      node.right = n.at("r").get<int>();
    }
    t.nodes_.push_back(std::move(node));
  }
  return t;
}

}  // namespace botdetect::ml
