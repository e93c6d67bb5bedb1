#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace botdetect {

// A finite real or the explicit MISSING marker. Degenerate inputs map to
// MISSING so downstream imputation can tell them apart from real zeros.
class FeatureValue {
 public:
  FeatureValue() = default;  // MISSING
  static FeatureValue missing() { return {}; }
  static FeatureValue of(double v) {
    if (!std::isfinite(v))
      throw std::logic_error("feature value must be finite");
    FeatureValue f;
    f.value_ = v;
    return f;
  }

  bool is_missing() const { return !value_.has_value(); }
  explicit operator bool() const { return value_.has_value(); }
  double value() const { return value_.value(); }
  double value_or(double fallback) const { return value_.value_or(fallback); }

  bool operator==(const FeatureValue&) const = default;

 private:
  std::optional<double> value_;
};

}  // namespace botdetect
