#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace botdetect {

// Keccak-256 as used by Ethereum (original Keccak padding 0x01, not the
// FIPS-202 SHA3 padding). Everything is constexpr so signature hashes can be
// checked at compile time.
namespace keccak_detail {

inline constexpr std::array<std::uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

inline constexpr std::array<int, 25> kRotations = {
    0, 1, 62, 28, 27, 36, 44, 6, 55, 20, 3, 10, 43,
    25, 39, 41, 45, 15, 21, 8, 18, 2, 61, 56, 14};

constexpr std::uint64_t rotl(std::uint64_t x, int n) {
  return n == 0 ? x : (x << n) | (x >> (64 - n));
}

constexpr void permute(std::array<std::uint64_t, 25>& a) {
  for (std::uint64_t rc : kRoundConstants) {
    std::array<std::uint64_t, 5> c{};
    for (int x = 0; x < 5; ++x)
      c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
    for (int x = 0; x < 5; ++x) {
      std::uint64_t d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
      for (int y = 0; y < 25; y += 5) a[y + x] ^= d;
    }
    // rho + pi
    std::array<std::uint64_t, 25> b{};
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y)
        b[y + 5 * ((2 * x + 3 * y) % 5)] = rotl(a[x + 5 * y], kRotations[x + 5 * y]);
    // chi
    for (int y = 0; y < 25; y += 5)
      for (int x = 0; x < 5; ++x)
        a[y + x] = b[y + x] ^ (~b[y + (x + 1) % 5] & b[y + (x + 2) % 5]);
    // iota
    a[0] ^= rc;
  }
}

// Sponge with rate 136 bytes and 32-byte output. `pad` is the domain byte:
// 0x01 for Keccak-256, 0x06 for SHA3-256.
template <typename ByteAt>
constexpr std::array<std::uint8_t, 32> sponge(std::size_t size, ByteAt at,
                                              std::uint8_t pad) {
  constexpr std::size_t kRate = 136;
  std::array<std::uint64_t, 25> state{};
  std::size_t pos = 0;
  auto absorb_block = [&](const std::array<std::uint8_t, kRate>& block) {
    for (std::size_t i = 0; i < kRate / 8; ++i) {
      std::uint64_t lane = 0;
      for (int j = 7; j >= 0; --j) lane = lane << 8 | block[8 * i + j];
      state[i] ^= lane;
    }
    permute(state);
  };
  while (size - pos >= kRate) {
    std::array<std::uint8_t, kRate> block{};
    for (std::size_t i = 0; i < kRate; ++i) block[i] = at(pos + i);
    absorb_block(block);
    pos += kRate;
  }
  std::array<std::uint8_t, kRate> last{};
  const std::size_t rem = size - pos;
  for (std::size_t i = 0; i < rem; ++i) last[i] = at(pos + i);
  last[rem] ^= pad;
  last[kRate - 1] ^= 0x80;
  absorb_block(last);

  std::array<std::uint8_t, 32> out{};
  for (std::size_t i = 0; i < 32; ++i)
    out[i] = static_cast<std::uint8_t>(state[i / 8] >> (8 * (i % 8)));
  return out;
}

}  // namespace keccak_detail

constexpr std::array<std::uint8_t, 32> keccak256(std::string_view text) {
  return keccak_detail::sponge(
      text.size(),
      [&](std::size_t i) { return static_cast<std::uint8_t>(text[i]); }, 0x01);
}

constexpr std::array<std::uint8_t, 32> keccak256(
    std::span<const std::uint8_t> bytes) {
  return keccak_detail::sponge(
      bytes.size(), [&](std::size_t i) { return bytes[i]; }, 0x01);
}

// Same permutation with FIPS-202 padding; exposed so the permutation can be
// checked against independent SHA3-256 vectors.
constexpr std::array<std::uint8_t, 32> sha3_256(std::string_view text) {
  return keccak_detail::sponge(
      text.size(),
      [&](std::size_t i) { return static_cast<std::uint8_t>(text[i]); }, 0x06);
}

}  // namespace botdetect
