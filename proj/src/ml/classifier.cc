#include "botdetect/ml/classifier.h"

#include <stdexcept>

namespace botdetect::ml {

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::kRandomForest: return "random_forest";
    case ClassifierKind::kGradientBoosting: return "gradient_boosting";
    case ClassifierKind::kAdaBoost: return "adaboost";
  }
  return "?";
}

ClassifierKind parse_classifier(std::string_view s) {
  if (s == "random_forest") return ClassifierKind::kRandomForest;
  if (s == "gradient_boosting") return ClassifierKind::kGradientBoosting;
  if (s == "adaboost") return ClassifierKind::kAdaBoost;
  throw std::invalid_argument("unknown classifier '" + std::string(s) + "'");
}

nlohmann::json ClassifierSpec::hyperparameters() const {
  switch (kind) {
    case ClassifierKind::kRandomForest:
      return {{"n_trees", random_forest.n_trees}, {"max_features", random_forest.max_features}};
    case ClassifierKind::kGradientBoosting:
      return {{"rounds", gradient_boosting.rounds},
              {"depth", gradient_boosting.depth},
              {"rate", gradient_boosting.rate}};
    case ClassifierKind::kAdaBoost:
      return {{"rounds", adaboost.rounds}};
  }
  return {};
}

ClassifierModel ClassifierModel::fit(const ClassifierSpec& spec, const Matrix& x,
                                     std::span<const int> y, std::vector<std::string> classes,
                                     std::uint64_t seed) {
  ClassifierModel m;
  m.seed_ = seed;
  const std::size_t k = classes.size();
  switch (spec.kind) {
    case ClassifierKind::kRandomForest:
      m.impl_ = RandomForest::fit(x, y, k, seed, spec.random_forest);
      break;
    case ClassifierKind::kGradientBoosting:
      m.impl_ = GradientBoosting::fit(x, y, k, spec.gradient_boosting);
      break;
    case ClassifierKind::kAdaBoost:
      m.impl_ = AdaBoost::fit(x, y, k, spec.adaboost);
      break;
  }
  m.classes_ = std::move(classes);
  return m;
}

ClassifierKind ClassifierModel::kind() const {
  return static_cast<ClassifierKind>(impl_.index());
}

std::vector<double> ClassifierModel::predict_proba_row(std::span<const double> row) const {
  std::vector<double> out(classes_.size());
  std::visit([&](const auto& m) { m.predict_proba(row, out); }, impl_);
  return out;
}

Matrix ClassifierModel::predict_proba(const Matrix& x) const {
  Matrix out(x.rows(), static_cast<Eigen::Index>(classes_.size()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto p = predict_proba_row(row_span(x, i));
    for (std::size_t c = 0; c < p.size(); ++c) out(i, static_cast<Eigen::Index>(c)) = p[c];
  }
  return out;
}

std::vector<int> ClassifierModel::predict(const Matrix& x) const {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out[static_cast<std::size_t>(i)] = static_cast<int>(argmax(predict_proba_row(row_span(x, i))));
  return out;
}

nlohmann::json ClassifierModel::to_json() const {
  nlohmann::json j = {{"version", kFormatVersion},
                      {"kind", to_string(kind())},
                      {"seed", seed_},
                      {"classes", classes_}};
  std::visit([&](const auto& m) {
    nlohmann::json body = m.to_json();
    j["hyperparameters"] = body.at("params");
    j["model"] = std::move(body);
  }, impl_);
  return j;
}

ClassifierModel ClassifierModel::from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kFormatVersion)
    throw std::invalid_argument("unsupported classifier model version");
  ClassifierModel m;
  m.seed_ = j.at("seed").get<std::uint64_t>();
  m.classes_ = j.at("classes").get<std::vector<std::string>>();
  const auto& body = j.at("model");
  switch (parse_classifier(j.at("kind").get<std::string>())) {
    case ClassifierKind::kRandomForest: m.impl_ = RandomForest::from_json(body); break;
    case ClassifierKind::kGradientBoosting: m.impl_ = GradientBoosting::from_json(body); break;
    case ClassifierKind::kAdaBoost: m.impl_ = AdaBoost::from_json(body); break;
  }
  return m;
}

nlohmann::json Pipeline::to_json() const {
  return {{"version", kFormatVersion},
          {"features", features},
          {"preprocessor", preprocessor.to_json()},
          {"classifier", model.to_json()}};
}

Pipeline Pipeline::from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kFormatVersion)
    throw std::invalid_argument("unsupported pipeline version");
  return Pipeline{j.at("features").get<std::vector<std::string>>(),
                  Preprocessor::from_json(j.at("preprocessor")),
                  ClassifierModel::from_json(j.at("classifier"))};
}

}  // namespace botdetect::ml
