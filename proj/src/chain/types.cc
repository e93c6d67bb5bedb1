#include "botdetect/chain/types.h"

#include <stdexcept>

namespace botdetect {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view strip_prefix(std::string_view text) {
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
    text.remove_prefix(2);
  return text;
}

}  // namespace

std::string to_hex(const std::uint8_t* data, std::size_t size) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(size * 2, '0');
  for (std::size_t i = 0; i < size; ++i) {
    out[2 * i] = kDigits[data[i] >> 4];
    out[2 * i + 1] = kDigits[data[i] & 0xf];
  }
  return out;
}

Bytes from_hex(std::string_view text) {
  text = strip_prefix(text);
  if (text.size() % 2 != 0)
    throw std::invalid_argument("odd-length hex string");
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(text[2 * i]);
    int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex character");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

template <std::size_t N>
FixedBytes<N> FixedBytes<N>::from_hex(std::string_view text) {
  Bytes raw = botdetect::from_hex(text);
  if (raw.size() != N)
    throw std::invalid_argument("expected " + std::to_string(N) +
                                " bytes, got " + std::to_string(raw.size()));
  FixedBytes<N> out;
  std::copy(raw.begin(), raw.end(), out.bytes.begin());
  return out;
}

template struct FixedBytes<20>;
template struct FixedBytes<32>;

U256 u256_from_word(const std::uint8_t* word) {
  U256 v = 0;
  for (int i = 0; i < 32; ++i) {
    v <<= 8;
    v |= word[i];
  }
  return v;
}

I256 i256_from_word(const std::uint8_t* word) {
  U256 raw = u256_from_word(word);
  if ((word[0] & 0x80) == 0) return I256(raw);
  // Negative: magnitude is the two's complement of the raw word.
  U256 magnitude = ~raw + 1;
  return -I256(magnitude);
}

Word word_from_u256(const U256& v) {
  Word w{};
  U256 x = v;
  for (int i = 31; i >= 0; --i) {
    w[i] = static_cast<std::uint8_t>(x & 0xff);
    x >>= 8;
  }
  return w;
}

Word word_from_i256(const I256& v) {
  if (v >= 0) return word_from_u256(U256(v));
  U256 magnitude = U256(-v);
  return word_from_u256(~magnitude + 1);
}

U256 parse_u256(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty integer");
  const bool hex = text.size() > 2 && text[0] == '0' &&
                   (text[1] == 'x' || text[1] == 'X');
  using Wide = boost::multiprecision::uint512_t;
  Wide v = 0;
  static const Wide kMax = Wide(std::numeric_limits<U256>::max());
  if (hex) {
    for (char c : text.substr(2)) {
      int d = hex_value(c);
      if (d < 0) throw std::invalid_argument("invalid hex digit in integer");
      v = v * 16 + d;
      if (v > kMax) throw std::invalid_argument("integer exceeds 256 bits");
    }
  } else {
    for (char c : text) {
      if (c < '0' || c > '9')
        throw std::invalid_argument("invalid decimal digit in integer");
      v = v * 10 + (c - '0');
      if (v > kMax) throw std::invalid_argument("integer exceeds 256 bits");
    }
  }
  return U256(v);
}

std::string to_decimal(const U256& v) { return v.str(); }

double to_double(const U256& v) { return v.convert_to<double>(); }
double to_double(const I256& v) { return v.convert_to<double>(); }

}  // namespace botdetect
