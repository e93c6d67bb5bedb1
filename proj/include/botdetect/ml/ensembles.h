#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/ml/matrix.h"
#include "botdetect/ml/tree.h"

namespace botdetect::ml {

struct RandomForestParams {
  std::size_t n_trees = 400;
  std::size_t max_features = 0;  // 0 = ceil(sqrt(d))
  std::size_t workers = 1;       // does not affect the fitted model
};

// Bagged Gini trees grown to purity. Class probability is the fraction of
// trees whose leaf majority votes for the class.
class RandomForest {
 public:
  static RandomForest fit(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                          std::uint64_t seed, const RandomForestParams& params = {});

  void predict_proba(std::span<const double> row, std::span<double> out) const;

  std::size_t n_classes() const { return n_classes_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const RandomForestParams& params() const { return params_; }

  nlohmann::json to_json() const;
  static RandomForest from_json(const nlohmann::json& j);

 private:
  std::size_t n_classes_ = 0;
  RandomForestParams params_;
  std::vector<DecisionTree> trees_;
};

struct GradientBoostingParams {
  std::size_t rounds = 100;
  std::size_t depth = 3;
  double rate = 0.1;
};

// Stagewise regression trees with Newton-step leaf values. Two classes use a
// single logistic score; more classes fit one tree per class per round on
// the softmax loss.
class GradientBoosting {
 public:
  static GradientBoosting fit(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                              const GradientBoostingParams& params = {});

  void predict_proba(std::span<const double> row, std::span<double> out) const;

  std::size_t n_classes() const { return n_classes_; }
  const GradientBoostingParams& params() const { return params_; }
  // Mean training log-loss after the prior and after each round.
  const std::vector<double>& training_loss() const { return loss_; }

  nlohmann::json to_json() const;
  static GradientBoosting from_json(const nlohmann::json& j);

 private:
  std::vector<double> raw_scores(std::span<const double> row) const;

  std::size_t n_classes_ = 0;
  GradientBoostingParams params_;
  std::vector<double> init_;                     // one per score
  std::vector<std::vector<DecisionTree>> stages_;  // rounds x scores
  std::vector<double> loss_;
};

struct AdaBoostParams {
  std::size_t rounds = 50;
};

// Multiclass SAMME over depth-1 stumps. Boosting stops at the first stump
// whose weighted error reaches 1 - 1/K (it is discarded) or at a perfect
// stump (kept, with its error clamped to 1e-10). Probabilities are the
// normalized alpha-weighted votes.
class AdaBoost {
 public:
  static AdaBoost fit(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                      const AdaBoostParams& params = {});

  void predict_proba(std::span<const double> row, std::span<double> out) const;

  std::size_t n_classes() const { return n_classes_; }
  const AdaBoostParams& params() const { return params_; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& errors() const { return errors_; }
  const std::vector<DecisionTree>& stumps() const { return stumps_; }

  nlohmann::json to_json() const;
  static AdaBoost from_json(const nlohmann::json& j);

 private:
  std::size_t n_classes_ = 0;
  AdaBoostParams params_;
  std::vector<DecisionTree> stumps_;
  std::vector<double> alphas_;
  std::vector<double> errors_;
};

}  // namespace botdetect::ml
