#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/ml/matrix.h"

namespace botdetect::ml {

enum class CovarianceType { kDiagonal, kFull };

std::string_view to_string(CovarianceType c);
CovarianceType parse_covariance(std::string_view s);

struct GmmOptions {
  CovarianceType covariance = CovarianceType::kDiagonal;
  // Variance floor: diagonal variances, or the eigenvalues of a full
  // covariance, never drop below it.
  double reg = 1e-6;
  int max_iterations = 200;
  double tolerance = 1e-6;  // stop when the total log-likelihood gains less
};

struct GmmModel {
  CovarianceType covariance = CovarianceType::kDiagonal;
  double reg = 1e-6;
  Vector weights;                 // k
  Matrix means;                   // k x d
  Matrix variances;               // k x d, diagonal covariance only
  std::vector<Matrix> covariances;  // k of d x d, full covariance only
  // Total log-likelihood of the fitting data at each E-step.
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  // Components re-seeded after collapsing to zero responsibility.
  int reseeds = 0;
  std::uint64_t seed = 0;

  std::size_t k() const { return static_cast<std::size_t>(means.rows()); }
  std::size_t dims() const { return static_cast<std::size_t>(means.cols()); }
  nlohmann::json to_json() const;
  static GmmModel from_json(const nlohmann::json& j);
};

// EM from a k-means++ initialization. A component whose total responsibility
// drops below 1e-10 is re-seeded at the fitting point with the lowest
// mixture likelihood, with the data's per-column variance as covariance.
GmmModel gmm_fit(const Matrix& x, std::size_t k, std::uint64_t seed,
                 const GmmOptions& options = {});

// n x k posterior responsibilities (rows sum to 1).
Matrix gmm_responsibilities(const GmmModel& model, const Matrix& x);
std::vector<int> gmm_predict(const GmmModel& model, const Matrix& x);
double gmm_log_likelihood(const GmmModel& model, const Matrix& x);
std::size_t gmm_free_parameters(const GmmModel& model);
// p ln n - 2 ln L.
double gmm_bic(const GmmModel& model, const Matrix& x);

}  // namespace botdetect::ml
