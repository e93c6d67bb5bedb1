#include "botdetect/ml/kmeans.h"

#include <limits>
#include <stdexcept>
#include <string>

#include "botdetect/common/random.h"

namespace botdetect::ml {
namespace {

double sq_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

// Assigns each row to its nearest centroid; returns the inertia.
double assign(const Matrix& x, const Matrix& centroids, std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = sq_dist(x, i, centroids, c);
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
    total += best;
  }
  return total;
}

struct Run {
  Matrix centroids;
  double inertia;
  int iterations;
  std::vector<double> trace;
};

Run lloyd(const Matrix& x, Matrix centroids, const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<int> labels(n, -1);
  Run run{std::move(centroids), 0.0, 0, {}};
  for (int it = 0; it < options.max_iterations; ++it) {
    const double inertia = assign(x, run.centroids, labels);
    run.trace.push_back(inertia);
    run.iterations = it + 1;

    Matrix sums = Matrix::Zero(run.centroids.rows(), x.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(run.centroids.rows()), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(labels[i]) += x.row(static_cast<Eigen::Index>(i));
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    double shift = 0.0;
    for (Eigen::Index c = 0; c < run.centroids.rows(); ++c) {
      const std::size_t cnt = counts[static_cast<std::size_t>(c)];
      if (cnt == 0) continue;
      Eigen::RowVectorXd next = sums.row(c) / static_cast<double>(cnt);
      shift = std::max(shift, (next - run.centroids.row(c)).norm());
      run.centroids.row(c) = next;
    }
    if (shift < options.tolerance) break;
  }
  run.inertia = assign(x, run.centroids, labels);
  if (run.trace.empty() || run.inertia != run.trace.back()) run.trace.push_back(run.inertia);
  return run;
}

}  // namespace

Matrix kmeans_plus_plus(const Matrix& x, std::size_t k, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  Rng rng(seed);
  Matrix centroids(static_cast<Eigen::Index>(k), x.cols());
  centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.index(n)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i)
    d2[i] = sq_dist(x, static_cast<Eigen::Index>(i), centroids, 0);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        if (u < d2[i]) {
          pick = i;
          break;
        }
        u -= d2[i];
      }
      // Guard against rounding landing on a zero-weight tail row.
      while (d2[pick] <= 0.0 && pick > 0) --pick;
    } else {
      pick = rng.index(n);
    }
    centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(x, static_cast<Eigen::Index>(i), centroids,
                                      static_cast<Eigen::Index>(c)));
  }
  return centroids;
}

KMeansModel kmeans_fit(const Matrix& x, std::size_t k, std::uint64_t seed,
                       const KMeansOptions& options) {
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (k > static_cast<std::size_t>(x.rows()))
    throw std::invalid_argument("kmeans: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(x.rows()) + " rows");
  KMeansModel best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Run run = lloyd(x, kmeans_plus_plus(x, k, derive_seed(seed, static_cast<std::uint64_t>(r))),
                    options);
    if (run.inertia < best.inertia) {
      best.centroids = std::move(run.centroids);
      best.inertia = run.inertia;
      best.iterations = run.iterations;
      best.inertia_trace = std::move(run.trace);
    }
  }
  best.seed = seed;
  return best;
}

std::vector<int> kmeans_predict(const KMeansModel& model, const Matrix& x) {
  std::vector<int> labels(static_cast<std::size_t>(x.rows()));
  assign(x, model.centroids, labels);
  return labels;
}

double kmeans_inertia(const KMeansModel& model, const Matrix& x) {
  std::vector<int> labels(static_cast<std::size_t>(x.rows()));
  return assign(x, model.centroids, labels);
}

nlohmann::json KMeansModel::to_json() const {
  std::vector<std::vector<double>> rows;
  for (Eigen::Index c = 0; c < centroids.rows(); ++c)
    rows.emplace_back(centroids.row(c).data(), centroids.row(c).data() + centroids.cols());
  return {{"kind", "kmeans"}, {"k", k()},           {"seed", seed},
          {"inertia", inertia}, {"iterations", iterations}, {"centroids", rows}};
}

KMeansModel KMeansModel::from_json(const nlohmann::json& j) {
  KMeansModel m;
  auto rows = j.at("centroids").get<std::vector<std::vector<double>>>();
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  m.centroids.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < d; ++c)
      m.centroids(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r].at(c);
  m.seed = j.at("seed").get<std::uint64_t>();
  m.inertia = j.at("inertia").get<double>();
  m.iterations = j.at("iterations").get<int>();
  return m;
}

}  // namespace botdetect::ml
