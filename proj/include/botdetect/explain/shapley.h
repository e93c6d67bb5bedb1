#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "botdetect/ml/matrix.h"

namespace botdetect::explain {

using ml::Matrix;

// Model output for one row: one value per class (probabilities).
using ModelFn = std::function<std::vector<double>(std::span<const double> row)>;

// Shapley attribution of every model output for one instance.
struct Attribution {
  std::vector<double> output;  // f(x), per class
  std::vector<double> base;    // mean of f over the background, per class
  // [feature][class]
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> std_error;  // zero for exhaustive results

  std::size_t features() const { return values.size(); }
  std::size_t classes() const { return output.size(); }
};

inline constexpr std::size_t kMaxExhaustiveFeatures = 12;

// Permutation sampling. Each permutation draws one background row z and
// walks the permutation, switching features of z to x one at a time; the
// change in f is that feature's marginal contribution. Permutation i uses
// derive_seed(seed, i) and results are reduced in permutation order.
Attribution shapley_monte_carlo(const ModelFn& f, const Matrix& background,
                                std::span<const double> x, std::size_t n_permutations,
                                std::uint64_t seed);

// Exact values by subset enumeration, with v(S) the mean over background
// rows of f(x on S, background elsewhere). Throws std::invalid_argument for
// more than kMaxExhaustiveFeatures features.
Attribution shapley_exhaustive(const ModelFn& f, const Matrix& background,
                               std::span<const double> x);

struct ExplainOptions {
  std::size_t permutations = 200;
  bool exhaustive = false;
  std::size_t workers = 1;
};

// One attribution per row of `instances`; row i uses derive_seed(seed, i).
std::vector<Attribution> explain_rows(const ModelFn& f, const Matrix& background,
                                      const Matrix& instances, const ExplainOptions& options,
                                      std::uint64_t seed);

// Up to `count` distinct rows drawn without replacement (all rows, in order,
// when count >= rows).
Matrix sample_background(const Matrix& rows, std::size_t count, std::uint64_t seed);

// Mean |attribution| per feature and class, with rows ordered by the total
// across classes (descending; ties by feature index).
struct AttributionTable {
  std::vector<std::size_t> order;          // feature indices, most important first
  std::vector<std::vector<double>> mean_abs;  // [feature][class], feature index order

  double total(std::size_t feature) const;
};

AttributionTable mean_abs_attribution(std::span<const Attribution> attributions);

// Long-format CSV: instance,feature,class,value,std_error. `provenance`
// becomes a leading '#' line when non-empty.
void write_attribution_csv(const std::string& path, std::span<const Attribution> attributions,
                           std::span<const std::string> instance_ids,
                           std::span<const std::string> feature_names,
                           std::span<const std::string> class_names,
                           const std::string& provenance);

}  // namespace botdetect::explain
