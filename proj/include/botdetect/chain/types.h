#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace botdetect {

using Bytes = std::vector<std::uint8_t>;

// Exact 256-bit arithmetic for on-chain amounts. I256 is sign-magnitude with
// a 256-bit magnitude, so every two's-complement int256 value fits.
using U256 = boost::multiprecision::uint256_t;
using I256 = boost::multiprecision::int256_t;

// Lowercase hex without prefix.
std::string to_hex(const std::uint8_t* data, std::size_t size);
inline std::string to_hex(const Bytes& b) { return to_hex(b.data(), b.size()); }

// Accepts an optional "0x"/"0X" prefix and either case. Throws
// std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view text);

template <std::size_t N>
struct FixedBytes {
  std::array<std::uint8_t, N> bytes{};

  static FixedBytes from_hex(std::string_view text);

  // 2N lowercase hex chars, no prefix.
  std::string hex() const { return to_hex(bytes.data(), N); }
  std::string prefixed() const { return "0x" + hex(); }

  auto operator<=>(const FixedBytes&) const = default;
  bool operator==(const FixedBytes&) const = default;
};

using Address = FixedBytes<20>;
using Hash32 = FixedBytes<32>;
using Word = std::array<std::uint8_t, 32>;

U256 u256_from_word(const std::uint8_t* word);
// Two's-complement interpretation of a 32-byte word.
I256 i256_from_word(const std::uint8_t* word);
Word word_from_u256(const U256& v);
Word word_from_i256(const I256& v);

// Decimal digits ("123") or 0x-prefixed hex. Throws std::invalid_argument
// on malformed text or values that do not fit in 256 bits.
U256 parse_u256(std::string_view text);
std::string to_decimal(const U256& v);
double to_double(const U256& v);
double to_double(const I256& v);

struct BlockInterval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;  // inclusive

  bool contains(std::uint64_t b) const { return b >= lo && b <= hi; }
  bool empty() const { return hi < lo; }
  std::uint64_t size() const { return empty() ? 0 : hi - lo + 1; }
};

}  // namespace botdetect

template <std::size_t N>
struct std::hash<botdetect::FixedBytes<N>> {
  std::size_t operator()(const botdetect::FixedBytes<N>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto b : v.bytes) h = (h ^ b) * 1099511628211ULL;
    return h;
  }
};
