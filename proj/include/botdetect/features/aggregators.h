#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "botdetect/chain/types.h"
#include "botdetect/features/feature_value.h"

namespace botdetect {

inline constexpr std::int64_t kSleepinessWindowSeconds = 172800;  // two days

// Leading nonzero decimal digit. x must be positive.
int first_significant_digit(double x);
int first_significant_digit(const U256& x);

// Pearson chi-squared goodness of fit of first-digit counts (index 0 is
// digit 1) against Benford's law, as an upper-tail probability with 8
// degrees of freedom. MISSING when all counts are zero.
FeatureValue benford_p_value_from_counts(const std::array<std::uint64_t, 9>& counts);

// Non-positive values are ignored.
FeatureValue benford_p_value(std::span<const U256> values);
FeatureValue benford_p_value(std::span<const double> values);

// True when no decimal digit after the seventh significant one is nonzero.
bool is_round(const U256& v);

// Fraction of positive values that are round; MISSING without positives.
FeatureValue trade_value_clustering(std::span<const U256> values);

// Mean over epoch-aligned two-day windows of the largest gap between
// consecutive timestamps inside the window. Windows with fewer than two
// timestamps do not count; MISSING when none qualify.
FeatureValue gap_based_sleepiness(std::span<const std::int64_t> sorted_timestamps);

struct NumericalStats {
  FeatureValue mean, mode, std, min, max, q95;
};

// Population standard deviation; mode ties go to the smallest value; q95 by
// linear interpolation at rank 0.95 * (n - 1).
NumericalStats numerical_stats(std::span<const double> values);

struct CategoricalStats {
  FeatureValue entropy;
  std::vector<FeatureValue> shares;  // one per domain class, domain order
  FeatureValue mode;                 // the category value itself
};

// Natural-log entropy, per-class shares over a fixed domain and the mode
// (ties by domain order). Throws std::invalid_argument for values outside
// the domain.
CategoricalStats categorical_stats(std::span<const int> values,
                                   std::span<const int> domain);

// Natural-log entropy of a count vector; zero counts contribute nothing.
double entropy_of_counts(std::span<const std::uint64_t> counts);

// Entropy of the hour-of-day histogram (24 bins).
FeatureValue hour_of_day_entropy(std::span<const std::int64_t> timestamps);

struct AddressFeatures {
  FeatureValue n_leading_zeros;
  FeatureValue digit_entropy;
};

AddressFeatures address_features(const Address& a);

}  // namespace botdetect
