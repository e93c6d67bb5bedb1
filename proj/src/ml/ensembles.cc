#include "botdetect/ml/ensembles.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "botdetect/common/parallel.h"
#include "botdetect/common/random.h"

namespace botdetect::ml {
namespace {

void check_targets(const Matrix& x, std::span<const int> y, std::size_t n_classes) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw std::invalid_argument("classifier: row/label count mismatch");
  if (y.empty()) throw std::invalid_argument("classifier: no training rows");
  std::vector<bool> seen(n_classes, false);
  for (int c : y) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_classes)
      throw std::invalid_argument("classifier: label " + std::to_string(c) + " out of range");
    seen[static_cast<std::size_t>(c)] = true;
  }
  if (std::count(seen.begin(), seen.end(), true) < 2)
    throw std::invalid_argument("classifier: training labels contain a single class");
}

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

void softmax(std::span<const double> raw, std::span<double> out) {
  const double mx = *std::max_element(raw.begin(), raw.end());
  double s = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) s += out[k] = std::exp(raw[k] - mx);
  for (std::size_t k = 0; k < raw.size(); ++k) out[k] /= s;
}

nlohmann::json trees_json(const std::vector<DecisionTree>& trees) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : trees) out.push_back(t.to_json());
  return out;
}

std::vector<DecisionTree> trees_from(const nlohmann::json& j) {
  std::vector<DecisionTree> out;
  for (const auto& t : j) out.push_back(DecisionTree::from_json(t));
  return out;
}

}  // namespace

// ---- random forest ----

RandomForest RandomForest::fit(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                               std::uint64_t seed, const RandomForestParams& params) {
  check_targets(x, y, n_classes);
  if (params.n_trees == 0) throw std::invalid_argument("random forest: n_trees must be positive");
  RandomForest rf;
  rf.n_classes_ = n_classes;
  rf.params_ = params;
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  TreeParams tp;
  tp.criterion = Criterion::kGini;
  tp.max_features = params.max_features > 0
                        ? params.max_features
                        : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  rf.params_.max_features = tp.max_features;
  const TreeTargets targets{y, n_classes, {}};

  rf.trees_.resize(params.n_trees);
  parallel_for(params.n_trees, params.workers, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<double> weights(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) weights[rng.index(n)] += 1.0;
    rf.trees_[t] = DecisionTree::fit(x, targets, weights, tp, &rng);
  });
  return rf;
}

void RandomForest::predict_proba(std::span<const double> row, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : trees_) out[argmax(t.predict(row))] += 1.0;
  for (double& v : out) v /= static_cast<double>(trees_.size());
}

nlohmann::json RandomForest::to_json() const {
  return {{"n_classes", n_classes_},
          {"params", {{"n_trees", params_.n_trees}, {"max_features", params_.max_features}}},
          {"trees", trees_json(trees_)}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
  RandomForest rf;
  rf.n_classes_ = j.at("n_classes").get<std::size_t>();
  rf.params_.n_trees = j.at("params").at("n_trees").get<std::size_t>();
  rf.params_.max_features = j.at("params").at("max_features").get<std::size_t>();
  rf.trees_ = trees_from(j.at("trees"));
  return rf;
}

// ---- gradient boosting ----

GradientBoosting GradientBoosting::fit(const Matrix& x, std::span<const int> y,
                                       std::size_t n_classes,
                                       const GradientBoostingParams& params) {
  check_targets(x, y, n_classes);
  GradientBoosting gb;
  gb.n_classes_ = n_classes;
  gb.params_ = params;
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t scores = n_classes == 2 ? 1 : n_classes;

  std::vector<double> prior(n_classes, 0.0);
  for (int c : y) prior[static_cast<std::size_t>(c)] += 1.0;
  for (double& p : prior) p = std::max(p / static_cast<double>(n), 1e-12);
  if (scores == 1)
    gb.init_ = {std::log(prior[1] / prior[0])};
  else
    for (double p : prior) gb.init_.push_back(std::log(p));

  std::vector<std::vector<double>> raw(n, gb.init_);
  std::vector<std::vector<double>> prob(n, std::vector<double>(n_classes));
  auto refresh = [&] {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (scores == 1) {
        const double p = sigmoid(raw[i][0]);
        prob[i] = {1.0 - p, p};
      } else {
        softmax(raw[i], prob[i]);
      }
      loss -= std::log(std::max(prob[i][static_cast<std::size_t>(y[i])], 1e-300));
    }
    gb.loss_.push_back(loss / static_cast<double>(n));
  };
  refresh();

  TreeParams tp;
  tp.criterion = Criterion::kSquaredError;
  tp.max_depth = params.depth;
  const std::vector<double> weights(n, 1.0);
  std::vector<double> residual(n);
  const double k_factor =
      scores == 1 ? 1.0 : static_cast<double>(n_classes - 1) / static_cast<double>(n_classes);

  for (std::size_t round = 0; round < params.rounds; ++round) {
    std::vector<DecisionTree> stage;
    for (std::size_t k = 0; k < scores; ++k) {
      const std::size_t cls = scores == 1 ? 1 : k;
      for (std::size_t i = 0; i < n; ++i)
        residual[i] = (static_cast<std::size_t>(y[i]) == cls ? 1.0 : 0.0) - prob[i][cls];
      DecisionTree tree =
          DecisionTree::fit(x, TreeTargets{{}, 0, residual}, weights, tp, nullptr);
      // Newton step per leaf.
      std::vector<int> leaf(n);
      std::vector<double> num(tree.nodes().size(), 0.0), den(tree.nodes().size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        leaf[i] = tree.apply(row_span(x, static_cast<Eigen::Index>(i)));
        const double r = residual[i];
        num[static_cast<std::size_t>(leaf[i])] += r;
        den[static_cast<std::size_t>(leaf[i])] += std::abs(r) * (1.0 - std::abs(r));
      }
      for (std::size_t node = 0; node < tree.nodes().size(); ++node) {
        TreeNode& tn = tree.nodes()[node];
        if (!tn.leaf()) continue;
        tn.value = {std::abs(den[node]) < 1e-150 ? 0.0 : k_factor * num[node] / den[node]};
      }
      for (std::size_t i = 0; i < n; ++i)
        raw[i][k] += params.rate * tree.nodes()[static_cast<std::size_t>(leaf[i])].value[0];
      stage.push_back(std::move(tree));
    }
    gb.stages_.push_back(std::move(stage));
    refresh();
  }
  return gb;
}

std::vector<double> GradientBoosting::raw_scores(std::span<const double> row) const {
  std::vector<double> raw = init_;
  for (const auto& stage : stages_)
    for (std::size_t k = 0; k < stage.size(); ++k)
      raw[k] += params_.rate * stage[k].predict(row)[0];
  return raw;
}

void GradientBoosting::predict_proba(std::span<const double> row, std::span<double> out) const {
  const auto raw = raw_scores(row);
  if (raw.size() == 1) {
    const double p = sigmoid(raw[0]);
    out[0] = 1.0 - p;
    out[1] = p;
  } else {
    softmax(raw, out);
  }
}

nlohmann::json GradientBoosting::to_json() const {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : stages_) stages.push_back(trees_json(s));
  return {{"n_classes", n_classes_},
          {"params",
           {{"rounds", params_.rounds}, {"depth", params_.depth}, {"rate", params_.rate}}},
          {"init", init_},
          {"stages", stages}};
}

GradientBoosting GradientBoosting::from_json(const nlohmann::json& j) {
  GradientBoosting gb;
  gb.n_classes_ = j.at("n_classes").get<std::size_t>();
  const auto& p = j.at("params");
  gb.params_ = {p.at("rounds").get<std::size_t>(), p.at("depth").get<std::size_t>(),
                p.at("rate").get<double>()};
  gb.init_ = j.at("init").get<std::vector<double>>();
  for (const auto& s : j.at("stages")) gb.stages_.push_back(trees_from(s));
  return gb;
}

// ---- AdaBoost ----

AdaBoost AdaBoost::fit(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                       const AdaBoostParams& params) {
  check_targets(x, y, n_classes);
  AdaBoost ada;
  ada.n_classes_ = n_classes;
  ada.params_ = params;
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = static_cast<double>(n_classes);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  TreeParams tp;
  tp.criterion = Criterion::kGini;
  tp.max_depth = 1;
  tp.min_split_weight = 0.0;
  const TreeTargets targets{y, n_classes, {}};

  for (std::size_t round = 0; round < params.rounds; ++round) {
    DecisionTree stump = DecisionTree::fit(x, targets, w, tp, nullptr);
    std::vector<bool> wrong(n);
    double err = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto pred = argmax(stump.predict(row_span(x, static_cast<Eigen::Index>(i))));
      wrong[i] = pred != static_cast<std::size_t>(y[i]);
      if (wrong[i]) err += w[i];
      total += w[i];
    }
    err /= total;
    if (err >= 1.0 - 1.0 / k) {
      // An ensemble needs at least one member; a first stump that is no
      // better than chance is kept with unit weight.
      if (ada.stumps_.empty()) {
        ada.stumps_.push_back(std::move(stump));
        ada.alphas_.push_back(1.0);
        ada.errors_.push_back(err);
      }
      break;
    }
    const bool perfect = err <= 0.0;
    const double e = std::max(err, 1e-10);
    const double alpha = std::log((1.0 - e) / e) + std::log(k - 1.0);
    ada.stumps_.push_back(std::move(stump));
    ada.alphas_.push_back(alpha);
    ada.errors_.push_back(err);
    if (perfect) break;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) w[i] *= std::exp(alpha);
      s += w[i];
    }
    for (double& v : w) v /= s;
  }
  return ada;
}

void AdaBoost::predict_proba(std::span<const double> row, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < stumps_.size(); ++m) {
    out[argmax(stumps_[m].predict(row))] += alphas_[m];
    total += alphas_[m];
  }
  for (double& v : out) v /= total;
}

nlohmann::json AdaBoost::to_json() const {
  return {{"n_classes", n_classes_},
          {"params", {{"rounds", params_.rounds}}},
          {"alphas", alphas_},
          {"errors", errors_},
          {"stumps", trees_json(stumps_)}};
}

AdaBoost AdaBoost::from_json(const nlohmann::json& j) {
  AdaBoost a;
  a.n_classes_ = j.at("n_classes").get<std::size_t>();
  a.params_.rounds = j.at("params").at("rounds").get<std::size_t>();
  a.alphas_ = j.at("alphas").get<std::vector<double>>();
  a.errors_ = j.at("errors").get<std::vector<double>>();
  a.stumps_ = trees_from(j.at("stumps"));
  return a;
}

}  // namespace botdetect::ml
