#include "memnet/dyadic.hpp"

#include <cmath>
#include <limits>

#include "memnet/error.hpp"

namespace memnet {

std::size_t bit_len(const BigNat& n) {
  if (sgn(n) < 0) throw ParameterError("bit_len: negative value");
  if (sgn(n) == 0) return 0;
  return mpz_sizeinbase(n.get_mpz_t(), 2);
}

BigNat bin_range(const BigNat& n, std::size_t i, std::size_t j, std::size_t width) {
  if (i < 1 || i > j || j > width) {
    throw IndexError("bin_range: need 1 <= i <= j <= width, got i=" + std::to_string(i) +
                     " j=" + std::to_string(j) + " width=" + std::to_string(width));
  }
  if (bit_len(n) > width) throw IndexError("bin_range: value wider than padding width");
  BigNat out;
  mpz_fdiv_q_2exp(out.get_mpz_t(), n.get_mpz_t(), width - j);
  mpz_fdiv_r_2exp(out.get_mpz_t(), out.get_mpz_t(), j - i + 1);
  return out;
}

BigNat pack_blocks(std::span<const BigNat> values, std::size_t block_width) {
  if (block_width == 0) throw ParameterError("pack_blocks: block width must be positive");
  BigNat out = 0;
  for (const auto& v : values) {
    if (bit_len(v) > block_width) {
      throw OverflowError("pack_blocks: value " + v.get_str() + " exceeds " + std::to_string(block_width) +
                          "-bit block");
    }
    mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), block_width);
    out += v;
  }
  return out;
}

std::vector<BigNat> unpack_blocks(const BigNat& packed, std::size_t count, std::size_t block_width) {
  std::vector<BigNat> out;
  out.reserve(count);
  const std::size_t width = count * block_width;
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(bin_range(packed, k * block_width + 1, (k + 1) * block_width, width));
  }
  return out;
}

// ---------------------------------------------------------------------------

Dyadic::Dyadic(long value) : m_(value) { canonicalize(); }

Dyadic::Dyadic(const mpz_class& value, std::int64_t exponent) : m_(value), e_(exponent) { canonicalize(); }

Dyadic Dyadic::pow2(std::int64_t exponent) {
  Dyadic d;
  d.m_ = 1;
  d.e_ = exponent;
  return d;
}

std::optional<Dyadic> Dyadic::from_rational(const Rational& q) {
  const mpz_class& den = q.get_den();
  if (mpz_popcount(den.get_mpz_t()) != 1) return std::nullopt;
  const auto shift = static_cast<std::int64_t>(mpz_scan1(den.get_mpz_t(), 0));
  return Dyadic(q.get_num(), -shift);
}

Dyadic Dyadic::from_parts(int sign, const mpz_class& mantissa, std::int64_t exponent, bool strict) {
  if (sign < -1 || sign > 1 || sgn(mantissa) < 0) throw SchemaError("dyadic: bad sign or mantissa");
  if ((sign == 0) != (sgn(mantissa) == 0)) throw SchemaError("dyadic: sign disagrees with mantissa");
  Dyadic d;
  d.m_ = sign < 0 ? mpz_class(-mantissa) : mantissa;
  d.e_ = exponent;
  if (strict) {
    const bool canonical = d.is_zero() ? exponent == 0 : mpz_odd_p(mantissa.get_mpz_t()) != 0;
    if (!canonical) throw SchemaError("dyadic: non-canonical encoding");
  }
  d.canonicalize();
  return d;
}

void Dyadic::canonicalize() {
  if (sgn(m_) == 0) {
    e_ = 0;
    return;
  }
  const mp_bitcnt_t tz = mpz_scan1(m_.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_tdiv_q_2exp(m_.get_mpz_t(), m_.get_mpz_t(), tz);
    e_ += static_cast<std::int64_t>(tz);
  }
}

std::size_t Dyadic::bit_complexity() const {
  if (is_zero()) return 0;
  return mpz_sizeinbase(m_.get_mpz_t(), 2);
}

mpz_class Dyadic::floor() const {
  mpz_class out;
  if (e_ >= 0) {
    mpz_mul_2exp(out.get_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(e_));
  } else {
    mpz_fdiv_q_2exp(out.get_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(-e_));
  }
  return out;
}

Rational Dyadic::to_rational() const {
  Rational q;
  if (e_ >= 0) {
    mpz_mul_2exp(q.get_num_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(e_));
    q.get_den() = 1;
  } else {
    q.get_num() = m_;
    q.get_den() = 1;
    mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e_));
  }
  return q;  // already canonical: odd numerator over a power of two
}

double Dyadic::to_double() const {
  if (is_zero()) return 0.0;
  mpz_class mag = abs(m_);
  const std::size_t len = mpz_sizeinbase(mag.get_mpz_t(), 2);
  constexpr std::size_t kDigits = std::numeric_limits<double>::digits;
  std::int64_t exp = e_;
  if (len > kDigits) {
    const std::size_t shift = len - kDigits;
    const bool half = mpz_tstbit(mag.get_mpz_t(), shift - 1) != 0;
    const bool sticky = shift >= 2 && mpz_scan1(mag.get_mpz_t(), 0) < shift - 1;
    mpz_tdiv_q_2exp(mag.get_mpz_t(), mag.get_mpz_t(), shift);
    if (half && (sticky || mpz_odd_p(mag.get_mpz_t()))) mag += 1;
    exp += static_cast<std::int64_t>(shift);
  }
  const double base = mag.get_d();
  if (exp > std::numeric_limits<int>::max()) return sign() * std::numeric_limits<double>::infinity();
  if (exp < std::numeric_limits<int>::min()) return sign() * 0.0;
  return sign() * std::ldexp(base, static_cast<int>(exp));
}

std::string Dyadic::to_string() const { return memnet::to_string(to_rational()); }

Dyadic Dyadic::operator-() const {
  Dyadic d = *this;
  d.m_ = -d.m_;
  return d;
}

void Dyadic::add_shifted(const mpz_class& m, std::int64_t e, bool negate) {
  if (sgn(m) == 0) return;
  if (sgn(m_) == 0) {
    m_ = m;
    if (negate) m_ = -m_;
    e_ = e;
    return;
  }
  auto op = negate ? mpz_sub : mpz_add;
  if (e == e_) {
    op(m_.get_mpz_t(), m_.get_mpz_t(), m.get_mpz_t());
    canonicalize();  // odd + odd is even
  } else if (e > e_) {
    thread_local mpz_class tmp;
    mpz_mul_2exp(tmp.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(e - e_));
    op(m_.get_mpz_t(), m_.get_mpz_t(), tmp.get_mpz_t());
  } else {
    mpz_mul_2exp(m_.get_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(e_ - e));
    op(m_.get_mpz_t(), m_.get_mpz_t(), m.get_mpz_t());
    e_ = e;
  }
}

Dyadic& Dyadic::operator+=(const Dyadic& other) {
  add_shifted(other.m_, other.e_, false);
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& other) {
  add_shifted(other.m_, other.e_, true);
  return *this;
}

Dyadic& Dyadic::operator*=(const Dyadic& other) {
  if (is_zero() || other.is_zero()) {
    m_ = 0;
    e_ = 0;
    return *this;
  }
  m_ *= other.m_;
  e_ += other.e_;
  return *this;
}

void Dyadic::add_product(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero() || b.is_zero()) return;
  thread_local mpz_class prod;
  mpz_mul(prod.get_mpz_t(), a.m_.get_mpz_t(), b.m_.get_mpz_t());
  add_shifted(prod, a.e_ + b.e_, false);
}

Dyadic Dyadic::mul_pow2(std::int64_t k) const {
  Dyadic d = *this;
  if (!d.is_zero()) d.e_ += k;
  return d;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const int sa = a.sign();
  const int sb = b.sign();
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  int c;
  if (a.e_ == b.e_) {
    c = cmp(a.m_, b.m_);
  } else if (a.e_ > b.e_) {
    mpz_class t;
    mpz_mul_2exp(t.get_mpz_t(), a.m_.get_mpz_t(), static_cast<mp_bitcnt_t>(a.e_ - b.e_));
    c = cmp(t, b.m_);
  } else {
    mpz_class t;
    mpz_mul_2exp(t.get_mpz_t(), b.m_.get_mpz_t(), static_cast<mp_bitcnt_t>(b.e_ - a.e_));
    c = cmp(a.m_, t);
  }
  return c <=> 0;
}

nlohmann::json to_json(const Dyadic& v) {
  const mpz_class mag = v.mantissa();
  return nlohmann::json{{"s", v.sign()}, {"m", mag.get_str(16)}, {"e", v.exponent()}};
}

Dyadic dyadic_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("s") || !j.contains("m") || !j.contains("e")) {
    throw SchemaError("dyadic: expected object with s, m, e");
  }
  const auto& m = j.at("m");
  if (!m.is_string() || !j.at("s").is_number_integer() || !j.at("e").is_number_integer()) {
    throw SchemaError("dyadic: field types");
  }
  const std::string hex = m.get<std::string>();
  if (hex.empty() || hex.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw SchemaError("dyadic: mantissa must be lowercase hex");
  }
  mpz_class mant(hex, 16);
  return Dyadic::from_parts(j.at("s").get<int>(), mant, j.at("e").get<std::int64_t>(), true);
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace memnet
