#pragma once

// Test-only helpers: an ABI encoder written independently of the decoder,
// closed-form statistical oracles and small random generators.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "botdetect/chain/types.h"
#include "botdetect/common/random.h"

namespace bdtest {

using botdetect::Address;
using botdetect::Bytes;
using botdetect::I256;
using botdetect::Rng;
using botdetect::U256;

// Big-endian 32-byte encoding by repeated division.
inline Bytes uint_word(U256 v) {
  Bytes out(32, 0);
  for (int i = 31; i >= 0 && v != 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(static_cast<unsigned>(v % 256));
    v /= 256;
  }
  return out;
}

// Two's complement: negative values encode as 2^256 - |v|.
inline Bytes int_word(const I256& v) {
  if (v >= 0) return uint_word(U256(v));
  const U256 mag = U256(-v);
  return uint_word(U256(~mag) + 1);
}

inline Bytes address_word(const Address& a) {
  Bytes out(12, 0);
  out.insert(out.end(), a.bytes.begin(), a.bytes.end());
  return out;
}

using AbiValue = std::variant<U256, Address, std::vector<Address>>;

// Standard head/tail layout for static uint256/address and dynamic address[].
inline Bytes encode_call(const std::array<std::uint8_t, 4>& selector,
                         const std::vector<AbiValue>& args) {
  Bytes head, tail;
  const std::size_t head_size = 32 * args.size();
  for (const auto& a : args) {
    if (const auto* u = std::get_if<U256>(&a)) {
      auto w = uint_word(*u);
      head.insert(head.end(), w.begin(), w.end());
    } else if (const auto* addr = std::get_if<Address>(&a)) {
      auto w = address_word(*addr);
      head.insert(head.end(), w.begin(), w.end());
    } else {
      const auto& arr = std::get<std::vector<Address>>(a);
      auto off = uint_word(U256(head_size + tail.size()));
      head.insert(head.end(), off.begin(), off.end());
      auto len = uint_word(U256(arr.size()));
      tail.insert(tail.end(), len.begin(), len.end());
      for (const auto& e : arr) {
        auto w = address_word(e);
        tail.insert(tail.end(), w.begin(), w.end());
      }
    }
  }
  Bytes out(selector.begin(), selector.end());
  out.insert(out.end(), head.begin(), head.end());
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

inline Address random_address(Rng& rng) {
  Address a;
  for (auto& b : a.bytes) b = static_cast<std::uint8_t>(rng.index(256));
  return a;
}

inline U256 random_u256(Rng& rng) {
  // Mix magnitudes so small, mid and full-width values all occur.
  const std::size_t bytes = 1 + rng.index(32);
  U256 v = 0;
  for (std::size_t i = 0; i < bytes; ++i) v = (v << 8) | rng.index(256);
  return v;
}

inline I256 random_i256(Rng& rng) {
  U256 mag = random_u256(rng) >> 1;  // fits in 255 bits
  I256 v(mag);
  return rng.bernoulli(0.5) ? I256(-v) : v;
}

// Upper tail of chi-squared with 8 degrees of freedom:
// exp(-x/2) * sum_{i=0}^{3} (x/2)^i / i!
inline double chi2_survival_8dof(double x) {
  const double h = x / 2.0;
  return std::exp(-h) * (1.0 + h + h * h / 2.0 + h * h * h / 6.0);
}

// Pearson statistic of first-digit counts against log10(1 + 1/d).
inline double benford_statistic(const std::array<std::uint64_t, 9>& counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  double chi2 = 0.0;
  for (int d = 1; d <= 9; ++d) {
    const double expected = n * std::log10(1.0 + 1.0 / d);
    const double diff = static_cast<double>(counts[static_cast<std::size_t>(d - 1)]) - expected;
    chi2 += diff * diff / expected;
  }
  return chi2;
}

struct BruteQuality {
  double purity = 0.0;
  double entropy = 0.0;
};

// Recomputes weighted purity and normalized entropy by scanning the raw
// pairs once per (cluster, class).
inline BruteQuality brute_force_quality(const std::vector<int>& assign,
                                        const std::vector<int>& labels, int n_classes) {
  std::set<int> clusters(assign.begin(), assign.end());
  const double n = static_cast<double>(assign.size());
  BruteQuality q;
  for (int c : clusters) {
    double size = 0.0;
    for (int a : assign) size += (a == c);
    double best = 0.0, h = 0.0;
    for (int k = 0; k < n_classes; ++k) {
      double cnt = 0.0;
      for (std::size_t i = 0; i < assign.size(); ++i) cnt += (assign[i] == c && labels[i] == k);
      best = std::max(best, cnt);
      if (cnt > 0) h += -(cnt / size) * std::log(cnt / size);
    }
    q.purity += (size / n) * (best / size);
    q.entropy += (size / n) * (n_classes > 1 ? h / std::log(static_cast<double>(n_classes)) : 0.0);
  }
  return q;
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("botdetect-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace bdtest
