#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace memnet {

// Nonnegative arbitrary-precision integer. Negative values are a caller bug;
// the bit utilities below check it.
using BigNat = mpz_class;
using Rational = mpq_class;

// Number of bits in the binary representation; bit_len(0) == 0.
std::size_t bit_len(const BigNat& n);

// Bits i..j (inclusive, 1 = most significant) of n viewed as a `width`-bit
// string padded with leading zeros, read back as an integer.
BigNat bin_range(const BigNat& n, std::size_t i, std::size_t j, std::size_t width);

// Concatenates fixed-width blocks, block 0 in the most significant position.
BigNat pack_blocks(std::span<const BigNat> values, std::size_t block_width);

// Inverse of pack_blocks for a known block count.
std::vector<BigNat> unpack_blocks(const BigNat& packed, std::size_t count, std::size_t block_width);

// Exact value sign * mantissa * 2^exponent kept in canonical form: the
// mantissa is odd, or the value is zero with exponent 0.
//
// Bit complexity of a dyadic is the length of its odd mantissa. Exponents are
// tracked separately (NetMetrics::exponent_range).
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value);  // NOLINT(google-explicit-constructor): integer literals
  explicit Dyadic(const mpz_class& value, std::int64_t exponent = 0);

  static Dyadic pow2(std::int64_t exponent);
  // Returns nullopt when the denominator is not a power of two.
  static std::optional<Dyadic> from_rational(const Rational& q);
  // Builds from explicit parts; rejects non-canonical input when strict.
  static Dyadic from_parts(int sign, const mpz_class& mantissa, std::int64_t exponent, bool strict);

  int sign() const { return sgn(m_); }
  bool is_zero() const { return sgn(m_) == 0; }
  mpz_class mantissa() const { return abs(m_); }
  const mpz_class& signed_mantissa() const { return m_; }
  std::int64_t exponent() const { return e_; }
  std::size_t bit_complexity() const;

  bool is_integer() const { return e_ >= 0; }
  mpz_class floor() const;
  Rational to_rational() const;
  // Round-to-nearest-even conversion.
  double to_double() const;
  // "p" or "p/q" with q a power of two.
  std::string to_string() const;

  Dyadic operator-() const;
  Dyadic& operator+=(const Dyadic& other);
  Dyadic& operator-=(const Dyadic& other);
  Dyadic& operator*=(const Dyadic& other);
  // this += a * b without an intermediate Dyadic.
  void add_product(const Dyadic& a, const Dyadic& b);
  Dyadic mul_pow2(std::int64_t k) const;

  friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
  friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
  friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }
  friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.e_ == b.e_ && a.m_ == b.m_; }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

 private:
  void canonicalize();
  void add_shifted(const mpz_class& m, std::int64_t e, bool negate);

  mpz_class m_;  // signed; odd unless zero
  std::int64_t e_ = 0;
};

inline Dyadic relu(const Dyadic& v) { return v.sign() < 0 ? Dyadic() : v; }

// Wire format: {"s": -1|0|1, "m": lowercase hex of |mantissa|, "e": exponent}.
nlohmann::json to_json(const Dyadic& v);
Dyadic dyadic_from_json(const nlohmann::json& j);

std::string to_string(const Rational& q);

}  // namespace memnet
