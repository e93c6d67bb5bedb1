#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/dataset/dataset.h"
#include "botdetect/ml/classifier.h"
#include "botdetect/ml/metrics.h"
#include "botdetect/ml/preprocess.h"

namespace botdetect::ml {

struct CvReport {
  std::string model;
  std::vector<std::string> classes;
  std::optional<int> positive_class;  // nullopt = macro averages
  std::vector<MetricSet> folds;
  MeanCi accuracy, precision, recall, f1;
  ConfusionMatrix confusion;  // summed over folds

  nlohmann::ordered_json to_json() const;
};

using Predictor = std::function<std::vector<int>(const Matrix& test)>;
// Fits on one training split and returns a predictor for its test split.
using Trainer =
    std::function<Predictor(const Matrix& train, std::span<const int> y, std::size_t fold)>;

// Runs `trainer` over the folds and summarizes per-fold metrics. Throws
// InputError when a training split holds a single class.
CvReport cross_validate(const Matrix& raw, std::span<const int> y,
                        const std::vector<std::string>& classes, std::span<const Fold> folds,
                        const Trainer& trainer, std::optional<int> positive_class);

// Preprocessor and classifier are fitted per training split; the classifier
// for fold i is seeded with derive_seed(seed, i).
CvReport cross_validate(const Matrix& raw, std::span<const int> y,
                        const std::vector<std::string>& classes, std::span<const Fold> folds,
                        const ClassifierSpec& spec, const PreprocessOptions& preprocess,
                        std::uint64_t seed, std::optional<int> positive_class);

}  // namespace botdetect::ml
