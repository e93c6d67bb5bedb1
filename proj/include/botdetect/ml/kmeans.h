#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/ml/matrix.h"

namespace botdetect::ml {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
  double tolerance = 1e-4;  // largest centroid shift (Euclidean)
};

struct KMeansModel {
  Matrix centroids;  // k x d
  double inertia = 0.0;
  int iterations = 0;
  // Inertia after each assignment step of the winning restart.
  std::vector<double> inertia_trace;
  std::uint64_t seed = 0;

  std::size_t k() const { return static_cast<std::size_t>(centroids.rows()); }
  nlohmann::json to_json() const;
  static KMeansModel from_json(const nlohmann::json& j);
};

// k-means++ seeding followed by Lloyd iterations, repeated `restarts` times
// with derived seeds; the restart with the lowest inertia wins (ties keep the
// earlier restart). A centroid whose cluster empties keeps its position.
KMeansModel kmeans_fit(const Matrix& x, std::size_t k, std::uint64_t seed,
                       const KMeansOptions& options = {});

// Nearest centroid; ties go to the lower cluster index.
std::vector<int> kmeans_predict(const KMeansModel& model, const Matrix& x);

double kmeans_inertia(const KMeansModel& model, const Matrix& x);

// Single k-means++ seeding pass (used to initialize other models).
Matrix kmeans_plus_plus(const Matrix& x, std::size_t k, std::uint64_t seed);

}  // namespace botdetect::ml
