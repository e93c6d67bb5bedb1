#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/common/diagnostics.h"
#include "botdetect/ml/matrix.h"

namespace botdetect::ml {

enum class Scaling { kMinMax, kStandardize };
enum class Imputation { kMean, kMinusOne };

std::string_view to_string(Scaling s);
std::string_view to_string(Imputation i);
Scaling parse_scaling(std::string_view s);
Imputation parse_imputation(std::string_view s);

struct PreprocessOptions {
  Scaling scaling = Scaling::kMinMax;
  Imputation imputation = Imputation::kMean;
  bool embed = false;
};

// Low-dimensional embedding applied after scaling and imputation.
class Embedding {
 public:
  virtual ~Embedding() = default;
  virtual void fit(const Matrix& x) = 0;
  virtual Matrix transform(const Matrix& x) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

// Projection onto the top principal components of the fitted data. Each
// component's sign is fixed so its largest-magnitude loading is positive.
class PcaEmbedding : public Embedding {
 public:
  explicit PcaEmbedding(int components = 2) : components_(components) {}

  void fit(const Matrix& x) override;
  Matrix transform(const Matrix& x) const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<PcaEmbedding> from_json(const nlohmann::json& j);

  const Matrix& components() const { return basis_; }  // d x c

 private:
  int components_;
  Vector mean_;
  Matrix basis_;
};

// Column scaling and missing-value imputation fitted on one dataset and
// applied to others. Input matrices mark missing cells with NaN.
//
// Mean imputation fills a missing cell with the fitted column mean before
// scaling. Minus-one imputation scales the observed cells and then writes -1
// into the missing ones, which places them outside the [0, 1] min-max range.
// Columns with no observed value at fit time transform to 0 (or -1 under
// minus-one imputation).
class Preprocessor {
 public:
  static Preprocessor fit(const Matrix& raw, const PreprocessOptions& options,
                          Diagnostics* diag = nullptr);

  Matrix transform(const Matrix& raw) const;

  const PreprocessOptions& options() const { return options_; }
  std::size_t input_columns() const { return offset_.size(); }

  nlohmann::json to_json() const;
  static Preprocessor from_json(const nlohmann::json& j);

 private:
  PreprocessOptions options_;
  std::vector<double> offset_;  // min or mean
  std::vector<double> scale_;   // range or std; 0 for constant columns
  std::vector<double> fill_;    // imputed raw value for mean imputation
  std::vector<bool> observed_;  // column had at least one value at fit time
  std::shared_ptr<Embedding> embedding_;
};

}  // namespace botdetect::ml
