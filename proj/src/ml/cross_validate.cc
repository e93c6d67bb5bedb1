#include "botdetect/ml/cross_validate.h"

#include <memory>
#include <set>

#include "botdetect/common/error.h"
#include "botdetect/common/random.h"

namespace botdetect::ml {

CvReport cross_validate(const Matrix& raw, std::span<const int> y,
                        const std::vector<std::string>& classes, std::span<const Fold> folds,
                        const Trainer& trainer, std::optional<int> positive_class) {
  if (folds.empty()) throw InputError("cross-validation needs at least one fold");
  CvReport report;
  report.classes = classes;
  report.positive_class = positive_class;
  report.confusion.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const Fold& fold = folds[f];
    const std::vector<int> y_train = select(y, fold.train);
    if (std::set<int>(y_train.begin(), y_train.end()).size() < 2)
      throw InputError("fold " + std::to_string(f) + ": training split contains a single class");
    const Predictor predict = trainer(select_rows(raw, fold.train), y_train, f);
    const std::vector<int> y_test = select(y, fold.test);
    const std::vector<int> y_pred = predict(select_rows(raw, fold.test));
    const ConfusionMatrix cm = confusion_matrix(y_test, y_pred, classes.size());
    for (std::size_t r = 0; r < cm.size(); ++r)
      for (std::size_t c = 0; c < cm.size(); ++c) report.confusion[r][c] += cm[r][c];
    report.folds.push_back(metrics_from_confusion(cm, positive_class));
  }

  auto summarize = [&](double MetricSet::*field) {
    std::vector<double> v;
    for (const auto& m : report.folds) v.push_back(m.*field);
    return mean_confidence_interval(v);
  };
  report.accuracy = summarize(&MetricSet::accuracy);
  report.precision = summarize(&MetricSet::precision);
  report.recall = summarize(&MetricSet::recall);
  report.f1 = summarize(&MetricSet::f1);
  return report;
}

CvReport cross_validate(const Matrix& raw, std::span<const int> y,
                        const std::vector<std::string>& classes, std::span<const Fold> folds,
                        const ClassifierSpec& spec, const PreprocessOptions& preprocess,
                        std::uint64_t seed, std::optional<int> positive_class) {
  Trainer trainer = [&](const Matrix& train, std::span<const int> y_train, std::size_t f) {
    auto pre = std::make_shared<Preprocessor>(Preprocessor::fit(train, preprocess));
    auto model = std::make_shared<ClassifierModel>(
        ClassifierModel::fit(spec, pre->transform(train), y_train, classes, derive_seed(seed, f)));
    return Predictor([pre, model](const Matrix& test) {
      return model->predict(pre->transform(test));
    });
  };
  CvReport report = cross_validate(raw, y, classes, folds, trainer, positive_class);
  report.model = std::string(to_string(spec.kind));
  return report;
}

nlohmann::ordered_json CvReport::to_json() const {
  auto metric = [](const MeanCi& ci) {
    return nlohmann::ordered_json{{"mean", ci.mean},
                                  {"lo", ci.lo},
                                  {"hi", ci.hi},
                                  {"formatted", format_mean_ci(ci)}};
  };
  nlohmann::ordered_json folds_json = nlohmann::ordered_json::array();
  for (const auto& m : folds)
    folds_json.push_back({{"accuracy", m.accuracy},
                          {"precision", m.precision},
                          {"recall", m.recall},
                          {"f1", m.f1}});
  nlohmann::ordered_json j;
  j["model"] = model;
  j["classes"] = classes;
  j["averaging"] = positive_class ? "positive:" + classes.at(static_cast<std::size_t>(*positive_class))
                                  : std::string("macro");
  j["folds"] = folds.size();
  j["accuracy"] = metric(accuracy);
  j["precision"] = metric(precision);
  j["recall"] = metric(recall);
  j["f1"] = metric(f1);
  j["confusion"] = confusion;
  j["per_fold"] = folds_json;
  return j;
}

}  // namespace botdetect::ml
