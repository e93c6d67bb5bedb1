#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "botdetect/ml/cluster_eval.h"
#include "botdetect/ml/gmm.h"
#include "botdetect/ml/kmeans.h"
#include "botdetect/ml/preprocess.h"
#include "support/support.h"

using namespace botdetect;
using namespace botdetect::ml;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Isotropic blobs around random centers.
Matrix blobs(Rng& rng, std::size_t per, std::size_t k, std::size_t d, double spread,
             std::vector<int>* truth = nullptr) {
  Matrix centers(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < centers.rows(); ++c)
    for (Eigen::Index j = 0; j < centers.cols(); ++j) centers(c, j) = rng.uniform(-10, 10);
  Matrix x(static_cast<Eigen::Index>(per * k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto c = i % static_cast<Eigen::Index>(k);
    if (truth) truth->push_back(static_cast<int>(c));
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = centers(c, j) + rng.normal(0, spread);
  }
  return x;
}

}  // namespace

TEST(Preprocess, MinMaxRangeAndImputation) {
  Matrix raw(4, 3);
  raw << 1, 5, kNaN,
         3, 5, kNaN,
         kNaN, 5, kNaN,
         2, 5, kNaN;
  auto minus = Preprocessor::fit(raw, {Scaling::kMinMax, Imputation::kMinusOne});
  Matrix t = minus.transform(raw);
  EXPECT_DOUBLE_EQ(t(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(t(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(t(2, 0), -1.0);
  EXPECT_DOUBLE_EQ(t(3, 0), 0.5);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(t(i, 1), 0.0);   // constant column
    EXPECT_DOUBLE_EQ(t(i, 2), -1.0);  // never observed
  }

  Diagnostics diag;
  auto mean = Preprocessor::fit(raw, {Scaling::kMinMax, Imputation::kMean}, &diag);
  Matrix tm = mean.transform(raw);
  EXPECT_DOUBLE_EQ(tm(2, 0), 0.5);  // column mean 2 maps to 0.5
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(tm(i, 2), 0.0);
  EXPECT_FALSE(diag.empty());
}

TEST(Preprocess, FitDataStaysInUnitRangeExceptImputed) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix raw(20, 5);
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
      for (Eigen::Index j = 0; j < raw.cols(); ++j)
        raw(i, j) = rng.bernoulli(0.2) ? kNaN : rng.uniform(-1e3, 1e3);
    auto p = Preprocessor::fit(raw, {Scaling::kMinMax, Imputation::kMinusOne});
    Matrix t = p.transform(raw);
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
      for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        if (std::isnan(raw(i, j))) {
          EXPECT_EQ(t(i, j), -1.0);
        } else {
          EXPECT_GE(t(i, j), 0.0);
          EXPECT_LE(t(i, j), 1.0);
        }
      }
  }
}

TEST(Preprocess, StandardizeUsesFittedStatisticsOnly) {
  Matrix fit_on(3, 1), other(2, 1);
  fit_on << 1, 2, 3;
  other << 100, 2;
  auto p = Preprocessor::fit(fit_on, {Scaling::kStandardize, Imputation::kMean});
  Matrix t = p.transform(other);
  const double sd = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(t(0, 0), 98.0 / sd, 1e-9);
  EXPECT_NEAR(t(1, 0), 0.0, 1e-12);
}

TEST(Preprocess, JsonRoundTripWithEmbedding) {
  Rng rng(2);
  Matrix raw = blobs(rng, 10, 3, 4, 1.0);
  raw(3, 1) = kNaN;
  auto p = Preprocessor::fit(raw, {Scaling::kMinMax, Imputation::kMean, true});
  Matrix t = p.transform(raw);
  EXPECT_EQ(t.cols(), 2);
  auto q = Preprocessor::from_json(p.to_json());
  EXPECT_EQ(q.transform(raw), t);
  EXPECT_EQ(parse_imputation("-1"), Imputation::kMinusOne);
  EXPECT_EQ(parse_scaling("standardize"), Scaling::kStandardize);
}

TEST(Pca, RecoversDominantAxis) {
  Rng rng(6);
  Matrix x(200, 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double t = rng.normal(0, 10);
    x.row(i) << t, 0.5 * t + rng.normal(0, 0.01), rng.normal(0, 0.1);
  }
  PcaEmbedding pca(2);
  pca.fit(x);
  const auto& b = pca.components();
  const double norm = std::sqrt(1.25);
  EXPECT_NEAR(b(0, 0), 1.0 / norm, 1e-3);
  EXPECT_NEAR(b(1, 0), 0.5 / norm, 1e-3);
}

TEST(KMeans, InertiaNonIncreasingAndFixedPoint) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng.index(5);
    Matrix x = blobs(rng, 5 + rng.index(20), 1 + rng.index(4), 1 + rng.index(4), 2.0);
    if (static_cast<std::size_t>(x.rows()) < k) continue;
    auto m = kmeans_fit(x, k, static_cast<std::uint64_t>(trial), {3, 300, 0.0});
    for (std::size_t i = 1; i < m.inertia_trace.size(); ++i)
      EXPECT_LE(m.inertia_trace[i], m.inertia_trace[i - 1] + 1e-9);
    EXPECT_NEAR(kmeans_inertia(m, x), m.inertia, 1e-9 * std::max(1.0, m.inertia));

    // Converged with zero tolerance: one more assign/update leaves it alone.
    auto assign = kmeans_predict(m, x);
    for (std::size_t c = 0; c < k; ++c) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x.cols());
      int count = 0;
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (assign[static_cast<std::size_t>(i)] == static_cast<int>(c)) {
          sum += x.row(i);
          ++count;
        }
      if (count == 0) continue;
      EXPECT_LT((sum / count - m.centroids.row(static_cast<Eigen::Index>(c))).norm(), 1e-9);
    }
  }
}

TEST(KMeans, DeterministicAndSerializable) {
  Rng rng(1);
  Matrix x = blobs(rng, 30, 3, 2, 1.0);
  auto a = kmeans_fit(x, 3, 42);
  auto b = kmeans_fit(x, 3, 42);
  EXPECT_EQ(a.centroids, b.centroids);
  auto c = KMeansModel::from_json(a.to_json());
  EXPECT_EQ(kmeans_predict(c, x), kmeans_predict(a, x));
  EXPECT_THROW(kmeans_fit(x, 1000, 1), std::invalid_argument);
}

TEST(Gmm, LogLikelihoodNonDecreasing) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng.index(4);
    Matrix x = blobs(rng, 15 + rng.index(30), 1 + rng.index(3), 1 + rng.index(3),
                     0.5 + rng.uniform() * 3);
    GmmOptions opts;
    opts.covariance = trial % 2 ? CovarianceType::kFull : CovarianceType::kDiagonal;
    auto m = gmm_fit(x, k, static_cast<std::uint64_t>(trial), opts);
    const auto& trace = m.log_likelihood_trace;
    for (std::size_t i = 1; i < trace.size(); ++i)
      EXPECT_GE(trace[i], trace[i - 1] - 1e-9) << "trial " << trial << " step " << i;
    EXPECT_NEAR(m.weights.sum(), 1.0, 1e-12);
    if (opts.covariance == CovarianceType::kDiagonal) {
      EXPECT_GE(m.variances.minCoeff(), opts.reg);
    } else {
      for (const auto& cov : m.covariances) EXPECT_GE(cov.diagonal().minCoeff(), opts.reg);
    }
    Matrix r = gmm_responsibilities(m, x);
    for (Eigen::Index i = 0; i < r.rows(); ++i) EXPECT_NEAR(r.row(i).sum(), 1.0, 1e-9);
  }
}

TEST(Gmm, RecoversSeparatedGaussians) {
  Rng rng(3);
  Matrix x(400, 2);
  std::vector<int> truth;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = static_cast<int>(i % 2);
    truth.push_back(c);
    x(i, 0) = rng.normal(c * 10.0, 1.0);
    x(i, 1) = rng.normal(0.0, 1.0);
  }
  auto m = gmm_fit(x, 2, 7);
  auto pred = gmm_predict(m, x);
  int agree = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) agree += pred[i] == truth[i];
  const double acc = std::max(agree, static_cast<int>(pred.size()) - agree) / 400.0;
  EXPECT_GE(acc, 0.99);
}

TEST(Gmm, BicAndSerialization) {
  Rng rng(5);
  Matrix x(80, 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal(i % 2 ? 8.0 : -8.0, 1.0);
  auto m = gmm_fit(x, 2, 1);
  EXPECT_EQ(gmm_free_parameters(m), 2u * 3 + 2u * 3 + 1);
  EXPECT_NEAR(gmm_bic(m, x),
              static_cast<double>(gmm_free_parameters(m)) * std::log(80.0) -
                  2 * gmm_log_likelihood(m, x),
              1e-9);
  GmmOptions full;
  full.covariance = CovarianceType::kFull;
  auto f = gmm_fit(x, 2, 1, full);
  EXPECT_EQ(gmm_free_parameters(f), 2u * 3 + 2u * 6 + 1);
  auto back = GmmModel::from_json(f.to_json());
  EXPECT_NEAR(gmm_log_likelihood(back, x), gmm_log_likelihood(f, x), 1e-9);
  EXPECT_EQ(parse_covariance("diag"), CovarianceType::kDiagonal);

  // BIC prefers the true component count on well separated data.
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= 5; ++k) {
    const double b = gmm_bic(gmm_fit(x, k, 9), x);
    if (b < best) {
      best = b;
      best_k = k;
    }
  }
  EXPECT_EQ(best_k, 2u);
}

TEST(ClusterQuality, MatchesBruteForce) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(50);
    const int clusters = 1 + static_cast<int>(rng.index(6));
    const int classes = 2 + static_cast<int>(rng.index(3));
    std::vector<int> assign(n), labels(n);
    for (auto& a : assign) a = static_cast<int>(rng.index(static_cast<std::uint64_t>(clusters)));
    for (auto& l : labels) l = static_cast<int>(rng.index(static_cast<std::uint64_t>(classes)));
    auto q = cluster_quality(assign, labels, static_cast<std::size_t>(classes));
    auto oracle = bdtest::brute_force_quality(assign, labels, classes);
    EXPECT_NEAR(q.weighted_purity, oracle.purity, 1e-12);
    EXPECT_NEAR(q.weighted_entropy, oracle.entropy, 1e-12);
  }
}

TEST(ClusterQuality, PublishedSpotValues) {
  // 51 of 55 in the majority class.
  std::vector<int> a(55, 0), l(55, 0);
  for (int i = 0; i < 4; ++i) l[static_cast<std::size_t>(i)] = 1;
  auto q = cluster_quality(a, l, 2);
  EXPECT_NEAR(q.clusters[0].purity, 0.927, 0.001);

  std::vector<int> a2(19, 0), l2(19, 0);
  for (int i = 0; i < 8; ++i) l2[static_cast<std::size_t>(i)] = 1;
  auto q2 = cluster_quality(a2, l2, 2);
  EXPECT_NEAR(q2.clusters[0].purity, 0.579, 0.001);
  EXPECT_NEAR(q2.clusters[0].entropy, 0.982, 0.001);
  EXPECT_EQ(q2.clusters[0].majority, 0);
}

TEST(ElbowAndSilhouette, Basics) {
  std::vector<std::pair<int, double>> curve{{1, 10}, {2, 4}, {3, 3}, {4, 2.9}, {5, 2.8}};
  EXPECT_EQ(elbow_select(curve), 2);
  std::vector<std::pair<int, double>> two{{1, 1}, {2, 0}};
  EXPECT_THROW(elbow_select(two), std::invalid_argument);

  Matrix x(4, 1);
  x << 0, 1, 10, 11;
  std::vector<int> good{0, 0, 1, 1};
  // a = 1, b = 10 or 9 / 11 or 10
  const double expect = (1 - 1.0 / 10.5 + 1 - 1.0 / 9.5 + 1 - 1.0 / 9.5 + 1 - 1.0 / 10.5) / 4;
  EXPECT_NEAR(silhouette_score(x, good), expect, 1e-12);
  std::vector<int> one{0, 0, 0, 0};
  EXPECT_THROW(silhouette_score(x, one), std::invalid_argument);
}
