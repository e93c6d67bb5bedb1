#include "botdetect/ml/metrics.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace botdetect::ml {
namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

struct ClassScores {
  double precision, recall, f1;
};

ClassScores class_scores(const ConfusionMatrix& cm, std::size_t c) {
  double tp = static_cast<double>(cm[c][c]);
  double predicted = 0.0, actual = 0.0;
  for (std::size_t r = 0; r < cm.size(); ++r) {
    predicted += static_cast<double>(cm[r][c]);
    actual += static_cast<double>(cm[c][r]);
  }
  const double p = ratio(tp, predicted);
  const double r = ratio(tp, actual);
  return {p, r, ratio(2.0 * p * r, p + r)};
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t n_classes) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion_matrix: length mismatch");
  ConfusionMatrix cm(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const auto t = static_cast<std::size_t>(y_true[i]);
    const auto p = static_cast<std::size_t>(y_pred[i]);
    if (t >= n_classes || p >= n_classes)
      throw std::invalid_argument("confusion_matrix: label out of range");
    ++cm[t][p];
  }
  return cm;
}

MetricSet metrics_from_confusion(const ConfusionMatrix& cm, std::optional<int> positive_class) {
  MetricSet m;
  double correct = 0.0, total = 0.0;
  for (std::size_t r = 0; r < cm.size(); ++r)
    for (std::size_t c = 0; c < cm.size(); ++c) {
      total += static_cast<double>(cm[r][c]);
      if (r == c) correct += static_cast<double>(cm[r][c]);
    }
  m.accuracy = ratio(correct, total);
  if (positive_class) {
    const auto s = class_scores(cm, static_cast<std::size_t>(*positive_class));
    m.precision = s.precision;
    m.recall = s.recall;
    m.f1 = s.f1;
  } else if (!cm.empty()) {
    for (std::size_t c = 0; c < cm.size(); ++c) {
      const auto s = class_scores(cm, c);
      m.precision += s.precision;
      m.recall += s.recall;
      m.f1 += s.f1;
    }
    const auto k = static_cast<double>(cm.size());
    m.precision /= k;
    m.recall /= k;
    m.f1 /= k;
  }
  return m;
}

MetricSet classification_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t n_classes, std::optional<int> positive_class) {
  return metrics_from_confusion(confusion_matrix(y_true, y_pred, n_classes), positive_class);
}

MeanCi mean_confidence_interval(std::span<const double> values, double level) {
  if (values.empty()) throw std::invalid_argument("confidence interval of no values");
  const auto k = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= k;
  if (values.size() == 1) return {mean, mean, mean};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / (k - 1.0));
  const boost::math::students_t dist(k - 1.0);
  const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
  const double half = t * s / std::sqrt(k);
  return {mean, mean - half, mean + half};
}

std::string format_mean_ci(const MeanCi& ci, int digits) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f (%.*f, %.*f)", digits, ci.mean, digits, ci.lo, digits,
                ci.hi);
  return buf;
}

}  // namespace botdetect::ml
