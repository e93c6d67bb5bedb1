#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/ml/ensembles.h"
#include "botdetect/ml/matrix.h"
#include "botdetect/ml/preprocess.h"

namespace botdetect::ml {

enum class ClassifierKind { kRandomForest, kGradientBoosting, kAdaBoost };

std::string_view to_string(ClassifierKind k);
ClassifierKind parse_classifier(std::string_view s);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kRandomForest;
  RandomForestParams random_forest;
  GradientBoostingParams gradient_boosting;
  AdaBoostParams adaboost;

  nlohmann::json hyperparameters() const;
};

class ClassifierModel {
 public:
  static constexpr int kFormatVersion = 1;

  static ClassifierModel fit(const ClassifierSpec& spec, const Matrix& x,
                             std::span<const int> y, std::vector<std::string> classes,
                             std::uint64_t seed);

  ClassifierKind kind() const;
  const std::vector<std::string>& classes() const { return classes_; }
  std::uint64_t seed() const { return seed_; }

  // Probabilities over classes(); each row sums to 1.
  std::vector<double> predict_proba_row(std::span<const double> row) const;
  Matrix predict_proba(const Matrix& x) const;
  // Argmax of predict_proba; ties go to the earlier class.
  std::vector<int> predict(const Matrix& x) const;

  const std::variant<RandomForest, GradientBoosting, AdaBoost>& impl() const { return impl_; }

  nlohmann::json to_json() const;
  static ClassifierModel from_json(const nlohmann::json& j);

 private:
  std::variant<RandomForest, GradientBoosting, AdaBoost> impl_;
  std::vector<std::string> classes_;
  std::uint64_t seed_ = 0;
};

// Preprocessor, classifier and the feature columns they expect.
struct Pipeline {
  static constexpr int kFormatVersion = 1;

  std::vector<std::string> features;
  Preprocessor preprocessor;
  ClassifierModel model;

  // Raw rows (NaN = missing) in `features` order.
  Matrix predict_proba(const Matrix& raw) const {
    return model.predict_proba(preprocessor.transform(raw));
  }

  nlohmann::json to_json() const;
  static Pipeline from_json(const nlohmann::json& j);
};

}  // namespace botdetect::ml
