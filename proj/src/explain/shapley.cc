#include "botdetect/explain/shapley.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "botdetect/common/error.h"
#include "botdetect/common/parallel.h"
#include "botdetect/common/random.h"

namespace botdetect::explain {
namespace {

std::vector<double> row_of(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), m.data() + (r + 1) * m.cols()};
}

std::vector<double> background_mean(const ModelFn& f, const Matrix& background) {
  std::vector<double> base;
  for (Eigen::Index r = 0; r < background.rows(); ++r) {
    const auto out = f(ml::row_span(background, r));
    if (base.empty()) base.assign(out.size(), 0.0);
    for (std::size_t c = 0; c < out.size(); ++c) base[c] += out[c];
  }
  for (double& v : base) v /= static_cast<double>(background.rows());
  return base;
}

void check_inputs(const Matrix& background, std::span<const double> x) {
  if (background.rows() == 0) throw std::invalid_argument("shapley: empty background");
  if (static_cast<std::size_t>(background.cols()) != x.size())
    throw std::invalid_argument("shapley: feature count mismatch");
}

std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Attribution shapley_monte_carlo(const ModelFn& f, const Matrix& background,
                                std::span<const double> x, std::size_t n_permutations,
                                std::uint64_t seed) {
  check_inputs(background, x);
  if (n_permutations == 0) throw std::invalid_argument("shapley: needs at least one permutation");
  const std::size_t d = x.size();
  Attribution a;
  a.output = f(x);
  a.base = background_mean(f, background);
  const std::size_t k = a.output.size();
  std::vector<std::vector<double>> sum(d, std::vector<double>(k, 0.0));
  std::vector<std::vector<double>> sq(d, std::vector<double>(k, 0.0));

  std::vector<std::size_t> perm(d);
  for (std::size_t p = 0; p < n_permutations; ++p) {
    Rng rng(derive_seed(seed, p));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<double> z = row_of(background, static_cast<Eigen::Index>(
                                                   rng.index(static_cast<std::size_t>(background.rows()))));
    std::vector<double> prev = f(z);
    for (std::size_t j : perm) {
      z[j] = x[j];
      std::vector<double> cur = f(z);
      for (std::size_t c = 0; c < k; ++c) {
        const double m = cur[c] - prev[c];
        sum[j][c] += m;
        sq[j][c] += m * m;
      }
      prev = std::move(cur);
    }
  }

  const auto n = static_cast<double>(n_permutations);
  a.values.assign(d, std::vector<double>(k, 0.0));
  a.std_error.assign(d, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      const double mean = sum[j][c] / n;
      a.values[j][c] = mean;
      if (n_permutations > 1) {
        const double var = std::max(0.0, (sq[j][c] - n * mean * mean) / (n - 1.0));
        a.std_error[j][c] = std::sqrt(var / n);
      }
    }
  }
  return a;
}

Attribution shapley_exhaustive(const ModelFn& f, const Matrix& background,
                               std::span<const double> x) {
  check_inputs(background, x);
  const std::size_t d = x.size();
  if (d > kMaxExhaustiveFeatures)
    throw std::invalid_argument("exhaustive Shapley supports at most " +
                                std::to_string(kMaxExhaustiveFeatures) + " features, got " +
                                std::to_string(d) + "; use Monte Carlo sampling instead");
  Attribution a;
  a.output = f(x);
  const std::size_t k = a.output.size();
  const std::size_t subsets = std::size_t{1} << d;

  // v(S) for every coalition S (bit j set = feature j taken from x).
  std::vector<std::vector<double>> v(subsets, std::vector<double>(k, 0.0));
  std::vector<double> z(d);
  for (std::size_t s = 0; s < subsets; ++s) {
    for (Eigen::Index r = 0; r < background.rows(); ++r) {
      for (std::size_t j = 0; j < d; ++j)
        z[j] = (s >> j & 1) ? x[j] : background(r, static_cast<Eigen::Index>(j));
      const auto out = f(z);
      for (std::size_t c = 0; c < k; ++c) v[s][c] += out[c];
    }
    for (double& val : v[s]) val /= static_cast<double>(background.rows());
  }
  a.base = v[0];

  // weight(|S|) = |S|! (d - |S| - 1)! / d!
  std::vector<double> weight(d, 0.0);
  for (std::size_t size = 0; size < d; ++size)
    weight[size] = std::exp(std::lgamma(static_cast<double>(size + 1)) +
                            std::lgamma(static_cast<double>(d - size)) -
                            std::lgamma(static_cast<double>(d + 1)));

  a.values.assign(d, std::vector<double>(k, 0.0));
  a.std_error.assign(d, std::vector<double>(k, 0.0));
  std::vector<double> terms;
  terms.reserve(subsets / 2);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      terms.clear();
      for (std::size_t s = 0; s < subsets; ++s) {
        if (s >> j & 1) continue;
        const auto size = static_cast<std::size_t>(std::popcount(s));
        terms.push_back(weight[size] * (v[s | (std::size_t{1} << j)][c] - v[s][c]));
      }
      // Summing in sorted order makes the result independent of which
      // feature index the terms came from.
      std::sort(terms.begin(), terms.end());
      a.values[j][c] = std::accumulate(terms.begin(), terms.end(), 0.0);
    }
  }
  return a;
}

std::vector<Attribution> explain_rows(const ModelFn& f, const Matrix& background,
                                      const Matrix& instances, const ExplainOptions& options,
                                      std::uint64_t seed) {
  std::vector<Attribution> out(static_cast<std::size_t>(instances.rows()));
  parallel_for(out.size(), options.workers, [&](std::size_t i) {
    const auto x = ml::row_span(instances, static_cast<Eigen::Index>(i));
    out[i] = options.exhaustive
                 ? shapley_exhaustive(f, background, x)
                 : shapley_monte_carlo(f, background, x, options.permutations, derive_seed(seed, i));
  });
  return out;
}

Matrix sample_background(const Matrix& rows, std::size_t count, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(rows.rows());
  if (count >= n) return rows;
  Rng rng(seed);
  std::vector<std::size_t> picked = sample_without_replacement(rng, n, count);
  std::sort(picked.begin(), picked.end());
  return ml::select_rows(rows, picked);
}

double AttributionTable::total(std::size_t feature) const {
  double t = 0.0;
  for (double v : mean_abs[feature]) t += v;
  return t;
}

AttributionTable mean_abs_attribution(std::span<const Attribution> attributions) {
  AttributionTable t;
  if (attributions.empty()) return t;
  const std::size_t d = attributions[0].features();
  const std::size_t k = attributions[0].classes();
  t.mean_abs.assign(d, std::vector<double>(k, 0.0));
  for (const auto& a : attributions) {
    if (a.features() != d || a.classes() != k)
      throw std::invalid_argument("mean_abs_attribution: inconsistent shapes");
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t c = 0; c < k; ++c) t.mean_abs[j][c] += std::abs(a.values[j][c]);
  }
  for (auto& row : t.mean_abs)
    for (double& v : row) v /= static_cast<double>(attributions.size());
  t.order.resize(d);
  std::iota(t.order.begin(), t.order.end(), 0);
  std::vector<double> totals(d);
  for (std::size_t j = 0; j < d; ++j) totals[j] = t.total(j);
  std::stable_sort(t.order.begin(), t.order.end(),
                   [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });
  return t;
}

void write_attribution_csv(const std::string& path, std::span<const Attribution> attributions,
                           std::span<const std::string> instance_ids,
                           std::span<const std::string> feature_names,
                           std::span<const std::string> class_names,
                           const std::string& provenance) {
  if (instance_ids.size() != attributions.size())
    throw std::invalid_argument("write_attribution_csv: instance id count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "instance,feature,class,value,std_error\n";
  for (std::size_t i = 0; i < attributions.size(); ++i) {
    const Attribution& a = attributions[i];
    for (std::size_t j = 0; j < a.features(); ++j)
      for (std::size_t c = 0; c < a.classes(); ++c)
        out << instance_ids[i] << ',' << feature_names[j] << ',' << class_names[c] << ','
            << csv_double(a.values[j][c]) << ',' << csv_double(a.std_error[j][c]) << '\n';
  }
  if (!out) throw InputError("failed writing " + path);
}

}  // namespace botdetect::explain
