#include "botdetect/features/aggregators.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace botdetect {

int first_significant_digit(double x) {
  if (!(x > 0) || !std::isfinite(x))
    throw std::invalid_argument("first_significant_digit: x must be positive");
  // Decimal scientific formatting avoids the off-by-one errors of
  // log10-based scaling near powers of ten.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15e", x);
  return buf[0] - '0';
}

int first_significant_digit(const U256& x) {
  if (x == 0)
    throw std::invalid_argument("first_significant_digit: x must be positive");
  U256 v = x;
  while (v >= 10) v /= 10;
  return static_cast<int>(v);
}

FeatureValue benford_p_value_from_counts(
    const std::array<std::uint64_t, 9>& counts) {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) return FeatureValue::missing();
  double chi2 = 0.0;
  for (int d = 1; d <= 9; ++d) {
    const double expected = static_cast<double>(n) * std::log10(1.0 + 1.0 / d);
    const double diff = static_cast<double>(counts[d - 1]) - expected;
    chi2 += diff * diff / expected;
  }
  // Survival function of chi-squared(k = 8) is Q(k/2, x/2).
  return FeatureValue::of(boost::math::gamma_q(4.0, chi2 / 2.0));
}

FeatureValue benford_p_value(std::span<const U256> values) {
  std::array<std::uint64_t, 9> counts{};
  for (const U256& v : values)
    if (v > 0) ++counts[first_significant_digit(v) - 1];
  return benford_p_value_from_counts(counts);
}

FeatureValue benford_p_value(std::span<const double> values) {
  std::array<std::uint64_t, 9> counts{};
  for (double v : values)
    if (v > 0) ++counts[first_significant_digit(v) - 1];
  return benford_p_value_from_counts(counts);
}

bool is_round(const U256& v) {
  const std::string digits = to_decimal(v);
  if (digits.size() <= 7) return true;
  return std::all_of(digits.begin() + 7, digits.end(),
                     [](char c) { return c == '0'; });
}

FeatureValue trade_value_clustering(std::span<const U256> values) {
  std::size_t positive = 0;
  std::size_t round = 0;
  for (const U256& v : values) {
    if (v == 0) continue;
    ++positive;
    if (is_round(v)) ++round;
  }
  if (positive == 0) return FeatureValue::missing();
  return FeatureValue::of(static_cast<double>(round) /
                          static_cast<double>(positive));
}

FeatureValue gap_based_sleepiness(std::span<const std::int64_t> ts) {
  auto window_of = [](std::int64_t t) {
    // floor division so negative timestamps land in the right window
    std::int64_t q = t / kSleepinessWindowSeconds;
    if (t % kSleepinessWindowSeconds != 0 && t < 0) --q;
    return q;
  };
  double sum = 0.0;
  std::size_t windows = 0;
  std::size_t i = 0;
  while (i < ts.size()) {
    const std::int64_t w = window_of(ts[i]);
    std::size_t j = i + 1;
    std::int64_t max_gap = -1;
    while (j < ts.size() && window_of(ts[j]) == w) {
      max_gap = std::max(max_gap, ts[j] - ts[j - 1]);
      ++j;
    }
    if (j - i >= 2) {
      sum += static_cast<double>(max_gap);
      ++windows;
    }
    i = j;
  }
  if (windows == 0) return FeatureValue::missing();
  return FeatureValue::of(sum / static_cast<double>(windows));
}

NumericalStats numerical_stats(std::span<const double> values) {
  NumericalStats s;
  if (values.empty()) return s;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double lo = sorted.front();
  const double hi = sorted.back();

  double sum = 0.0;
  for (double v : values) sum += v;
  // Rounding can push the mean of identical values past them.
  const double mean = std::clamp(sum / n, lo, hi);

  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double sd = lo == hi ? 0.0 : std::sqrt(sq / n);

  double mode = sorted.front();
  std::size_t best = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > best) {
      best = j - i;
      mode = sorted[i];
    }
    i = j;
  }

  const double pos = 0.95 * (n - 1.0);
  const std::size_t base = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(base);
  double q95 = sorted[base];
  if (base + 1 < sorted.size())
    q95 = sorted[base] + frac * (sorted[base + 1] - sorted[base]);
  q95 = std::clamp(q95, lo, hi);

  s.mean = FeatureValue::of(mean);
  s.mode = FeatureValue::of(mode);
  s.std = FeatureValue::of(sd);
  s.min = FeatureValue::of(lo);
  s.max = FeatureValue::of(hi);
  s.q95 = FeatureValue::of(q95);
  return s;
}

double entropy_of_counts(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

CategoricalStats categorical_stats(std::span<const int> values,
                                   std::span<const int> domain) {
  CategoricalStats s;
  s.shares.assign(domain.size(), FeatureValue::missing());
  std::vector<std::uint64_t> counts(domain.size(), 0);
  for (int v : values) {
    auto it = std::find(domain.begin(), domain.end(), v);
    if (it == domain.end())
      throw std::invalid_argument("categorical value " + std::to_string(v) +
                                  " outside its domain");
    ++counts[static_cast<std::size_t>(it - domain.begin())];
  }
  if (values.empty()) return s;

  std::size_t mode_idx = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    s.shares[i] = FeatureValue::of(static_cast<double>(counts[i]) /
                                   static_cast<double>(values.size()));
    if (counts[i] > counts[mode_idx]) mode_idx = i;
  }
  s.entropy = FeatureValue::of(entropy_of_counts(counts));
  s.mode = FeatureValue::of(domain[mode_idx]);
  return s;
}

FeatureValue hour_of_day_entropy(std::span<const std::int64_t> timestamps) {
  if (timestamps.empty()) return FeatureValue::missing();
  std::array<std::uint64_t, 24> counts{};
  for (std::int64_t t : timestamps) {
    std::int64_t hour = (t / 3600) % 24;
    if (hour < 0) hour += 24;
    ++counts[static_cast<std::size_t>(hour)];
  }
  return FeatureValue::of(entropy_of_counts(counts));
}

AddressFeatures address_features(const Address& a) {
  const std::string hex = a.hex();
  const auto zeros = hex.find_first_not_of('0');
  const std::size_t leading = zeros == std::string::npos ? hex.size() : zeros;
  std::array<std::uint64_t, 16> counts{};
  for (char c : hex) {
    const int d = c <= '9' ? c - '0' : c - 'a' + 10;
    ++counts[static_cast<std::size_t>(d)];
  }
  return {FeatureValue::of(static_cast<double>(leading)),
          FeatureValue::of(entropy_of_counts(counts))};
}

}  // namespace botdetect
