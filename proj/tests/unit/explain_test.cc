#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "botdetect/explain/shapley.h"
#include "support/support.h"

using namespace botdetect;
using namespace botdetect::explain;

namespace {

Matrix random_background(Rng& rng, std::size_t rows, std::size_t d) {
  Matrix bg(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < bg.rows(); ++i)
    for (Eigen::Index j = 0; j < bg.cols(); ++j) bg(i, j) = rng.uniform(-1, 1);
  return bg;
}

// Two-output model with interactions, a nonlinearity and an unused feature 7.
std::vector<double> toy8(std::span<const double> x) {
  const double z = 0.8 * x[0] - 0.5 * x[1] + x[2] * x[3] + 0.3 * std::sin(3 * x[4]) +
                   0.2 * x[5] * x[6] * x[0];
  const double p = 1.0 / (1.0 + std::exp(-z));
  return {1 - p, p};
}

}  // namespace

TEST(Shapley, LinearModelHasClosedForm) {
  Rng rng(1);
  Matrix bg = random_background(rng, 15, 4);
  const double w[] = {2.0, -1.0, 0.5, 0.0};
  ModelFn f = [&](std::span<const double> x) {
    double s = 0;
    for (int j = 0; j < 4; ++j) s += w[j] * x[static_cast<std::size_t>(j)];
    return std::vector<double>{s};
  };
  std::vector<double> x{0.3, -0.7, 0.9, 5.0};
  auto a = shapley_exhaustive(f, bg, x);
  for (int j = 0; j < 4; ++j)
    EXPECT_NEAR(a.values[static_cast<std::size_t>(j)][0], w[j] * (x[static_cast<std::size_t>(j)] - bg.col(j).mean()), 1e-12);
  EXPECT_EQ(a.values[3][0], 0.0);
}

TEST(Shapley, ExhaustiveEfficiencySymmetryDummy) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 3 + rng.index(6);
    Matrix bg = random_background(rng, 1 + rng.index(10), d);
    // Features 0 and 1 are exchangeable: the model is symmetric in them and
    // they share background columns and instance values.
    bg.col(1) = bg.col(0);
    ModelFn f = [](std::span<const double> x) {
      const double v = x[0] * x[1] + std::exp(x[0] + x[1]) + x[2] * x[2];
      return std::vector<double>{v, -2 * v + x[2]};
    };
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform(-1, 1);
    x[1] = x[0];
    auto a = shapley_exhaustive(f, bg, x);
    for (std::size_t c = 0; c < 2; ++c) {
      double sum = a.base[c];
      for (std::size_t j = 0; j < d; ++j) sum += a.values[j][c];
      EXPECT_NEAR(sum, a.output[c], 1e-12);
      EXPECT_EQ(a.values[0][c], a.values[1][c]);
      for (std::size_t j = 3; j < d; ++j) EXPECT_EQ(a.values[j][c], 0.0);
    }
  }
}

TEST(Shapley, MonteCarloConvergesToExhaustive) {
  Rng rng(3);
  Matrix bg = random_background(rng, 20, 8);
  std::vector<double> x{0.9, -0.8, 0.7, 0.6, 0.5, -0.4, 0.3, 0.2};
  auto exact = shapley_exhaustive(toy8, bg, x);
  auto mc = shapley_monte_carlo(toy8, bg, x, 10000, 17);
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t c = 0; c < 2; ++c) {
      EXPECT_NEAR(mc.values[j][c], exact.values[j][c], 0.05);
      EXPECT_LE(std::abs(mc.values[j][c] - exact.values[j][c]), 4 * mc.std_error[j][c] + 1e-12);
    }
  // Dummy feature: every marginal contribution is exactly zero.
  EXPECT_EQ(mc.values[7][0], 0.0);
  EXPECT_EQ(mc.std_error[7][0], 0.0);
  // Efficiency holds per permutation, so also for the average.
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0;
    for (std::size_t j = 0; j < 8; ++j) sum += mc.values[j][c];
    EXPECT_NEAR(sum, exact.output[c] - exact.base[c], 0.05);
  }
}

TEST(Shapley, MonteCarloSymmetryWithinStandardErrors) {
  Rng rng(4);
  Matrix bg = random_background(rng, 10, 4);
  bg.col(1) = bg.col(0);
  ModelFn f = [](std::span<const double> x) {
    return std::vector<double>{std::tanh(x[0] + x[1]) + x[2]};
  };
  std::vector<double> x{0.5, 0.5, -0.3, 0.1};
  auto mc = shapley_monte_carlo(f, bg, x, 2000, 5);
  const double se = std::hypot(mc.std_error[0][0], mc.std_error[1][0]);
  EXPECT_LE(std::abs(mc.values[0][0] - mc.values[1][0]), 3 * se);
}

TEST(Shapley, DoublingPermutationsStaysWithinError) {
  Rng rng(5);
  Matrix bg = random_background(rng, 20, 8);
  std::vector<double> x{0.1, 0.2, -0.3, 0.4, 0.5, 0.6, -0.7, 0.8};
  auto a = shapley_monte_carlo(toy8, bg, x, 2000, 1);
  auto b = shapley_monte_carlo(toy8, bg, x, 4000, 1);
  for (std::size_t j = 0; j < 8; ++j) {
    const double bound = 4 * std::hypot(a.std_error[j][1], b.std_error[j][1]);
    EXPECT_LE(std::abs(a.values[j][1] - b.values[j][1]), bound + 1e-12);
  }
}

TEST(Shapley, ConstantModelAndLimits) {
  Rng rng(6);
  Matrix bg = random_background(rng, 5, 3);
  ModelFn constant = [](std::span<const double>) { return std::vector<double>{0.25, 0.75}; };
  std::vector<double> x{1, 2, 3};
  for (const auto& a : {shapley_exhaustive(constant, bg, x),
                        shapley_monte_carlo(constant, bg, x, 50, 1)})
    for (const auto& row : a.values)
      for (double v : row) EXPECT_EQ(v, 0.0);

  Matrix wide = random_background(rng, 2, kMaxExhaustiveFeatures + 1);
  std::vector<double> xw(kMaxExhaustiveFeatures + 1, 0.0);
  EXPECT_THROW(shapley_exhaustive(constant, wide, xw), std::invalid_argument);
  EXPECT_THROW(shapley_monte_carlo(constant, bg, x, 0, 1), std::invalid_argument);
}

TEST(Explain, RowsAreWorkerIndependentAndRankingFollowsModel) {
  Rng rng(7);
  Matrix bg = random_background(rng, 30, 6);
  Matrix inst = random_background(rng, 12, 6);
  // Only features 4 and 5 matter; 5 more than 4.
  ModelFn f = [](std::span<const double> x) {
    const double p = 1.0 / (1.0 + std::exp(-(3 * x[5] + x[4])));
    return std::vector<double>{1 - p, p};
  };
  ExplainOptions opts{200, false, 1};
  auto serial = explain_rows(f, bg, inst, opts, 3);
  opts.workers = 4;
  auto parallel = explain_rows(f, bg, inst, opts, 3);
  ASSERT_EQ(serial.size(), 12u);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].values, parallel[i].values);

  auto table = mean_abs_attribution(serial);
  EXPECT_EQ(table.order[0], 5u);
  EXPECT_EQ(table.order[1], 4u);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(table.total(j), 0.0);
  // Ties among the unused features keep index order.
  EXPECT_EQ(std::vector<std::size_t>(table.order.begin() + 2, table.order.end()),
            (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Explain, BackgroundSamplingAndCsv) {
  Rng rng(8);
  Matrix rows = random_background(rng, 10, 2);
  Matrix all = sample_background(rows, 50, 1);
  EXPECT_EQ(all, rows);
  Matrix some = sample_background(rows, 4, 1);
  EXPECT_EQ(some.rows(), 4);
  EXPECT_EQ(sample_background(rows, 4, 1), some);

  ModelFn f = [](std::span<const double> x) { return std::vector<double>{x[0], -x[0]}; };
  auto attrs = explain_rows(f, rows, rows.topRows(2), {20, true, 1}, 1);
  auto dir = bdtest::scratch_dir("attribution");
  const std::vector<std::string> ids{"a", "b"}, feats{"f0", "f1"}, classes{"Human", "Bot"};
  write_attribution_csv((dir / "a.csv").string(), attrs, ids, feats, classes, "botdetect test");
  std::ifstream in(dir / "a.csv");
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  EXPECT_EQ(first, "# botdetect test");
  EXPECT_EQ(header, "instance,feature,class,value,std_error");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 2u * 2u * 2u);
}
