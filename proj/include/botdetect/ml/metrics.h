#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace botdetect::ml {

struct MetricSet {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// counts[true class][predicted class]
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t n_classes);

// With a positive class, precision/recall/F1 are for that class; otherwise
// they are unweighted means of the per-class values. A ratio with a zero
// denominator is 0.
MetricSet classification_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t n_classes, std::optional<int> positive_class);
MetricSet metrics_from_confusion(const ConfusionMatrix& cm, std::optional<int> positive_class);

struct MeanCi {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// mean +- t_{(1+level)/2, k-1} * s / sqrt(k) with sample standard deviation s.
// A single value gives a zero-width interval.
MeanCi mean_confidence_interval(std::span<const double> values, double level = 0.95);

// "0.83 (0.77, 0.88)"
std::string format_mean_ci(const MeanCi& ci, int digits = 2);

}  // namespace botdetect::ml
