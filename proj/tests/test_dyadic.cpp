#include <random>

#include "doctest.h"
#include "memnet/dyadic.hpp"
#include "memnet/error.hpp"

using namespace memnet;

namespace {

BigNat big(unsigned long v) { return BigNat(v); }

}  // namespace

TEST_CASE("bin_range worked values") {
  CHECK(bin_range(big(32), 1, 3, 6) == 4);
  CHECK(bin_range(big(5), 2, 2, 3) == 0);
  CHECK(bin_range(big(73), 5, 8, 8) == 9);
  CHECK(bin_range(big(73), 1, 4, 8) == 4);
  CHECK(bin_range(big(0), 1, 4, 4) == 0);
}

TEST_CASE("pack_blocks worked values") {
  std::vector<BigNat> a{big(4), big(9)};
  CHECK(pack_blocks(a, 4) == 73);
  std::vector<BigNat> b{big(3), big(1)};
  CHECK(pack_blocks(b, 2) == 13);
  std::vector<BigNat> c{big(0)};
  CHECK(pack_blocks(c, 5) == 0);
  CHECK(bit_len(big(32)) == 6);
  CHECK(bit_len(big(0)) == 0);
  CHECK(bit_len(big(1)) == 1);
}

TEST_CASE("pack and bin_range round trip") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t width = 1 + rng() % 12;
    const std::size_t count = 1 + rng() % 6;
    std::vector<BigNat> blocks(count);
    for (auto& v : blocks) v = BigNat(static_cast<unsigned long>(rng() % (1u << width)));
    const BigNat packed = pack_blocks(blocks, width);
    REQUIRE(bit_len(packed) <= width * count);
    CHECK(unpack_blocks(packed, count, width) == blocks);
    const std::size_t k = rng() % count;
    CHECK(bin_range(packed, k * width + 1, (k + 1) * width, width * count) == blocks[k]);
  }
}

TEST_CASE("dyadic arithmetic agrees with rationals") {
  std::mt19937_64 rng(11);
  auto draw = [&]() {
    const long m = static_cast<long>(rng() % 2001) - 1000;
    const std::int64_t e = static_cast<std::int64_t>(rng() % 21) - 10;
    return Dyadic(mpz_class(m), e);
  };
  for (int trial = 0; trial < 10000; ++trial) {
    const Dyadic a = draw();
    const Dyadic b = draw();
    const Rational qa = a.to_rational(), qb = b.to_rational();
    CHECK((a + b).to_rational() == qa + qb);
    CHECK((a - b).to_rational() == qa - qb);
    CHECK((a * b).to_rational() == qa * qb);
    CHECK(((a < b) == (qa < qb)));
    CHECK(((a == b) == (qa == qb)));
    Dyadic c = a;
    c.add_product(a, b);
    CHECK(c.to_rational() == qa + qa * qb);
    CHECK(relu(a).to_rational() == (qa < 0 ? Rational(0) : qa));
    // Canonical form: odd mantissa or zero with exponent 0.
    const Dyadic s = a + b;
    if (s.is_zero()) {
      CHECK(s.exponent() == 0);
    } else {
      CHECK(mpz_odd_p(s.mantissa().get_mpz_t()));
    }
    CHECK(Dyadic::from_rational(qa).value() == a);
    CHECK(dyadic_from_json(to_json(a)) == a);
  }
}

TEST_CASE("dyadic construction and bit complexity") {
  CHECK(Dyadic(12) == Dyadic(mpz_class(3), 2));
  CHECK(Dyadic(12).bit_complexity() == 2);
  CHECK(Dyadic::pow2(-5).bit_complexity() == 1);
  CHECK(Dyadic().bit_complexity() == 0);
  CHECK(Dyadic(mpz_class(-6), -3).to_string() == "-3/4");
  CHECK(Dyadic(mpz_class(-7), -1).floor() == -4);
  CHECK(Dyadic(mpz_class(1), -1).to_double() == 0.5);
  CHECK_FALSE(Dyadic::from_rational(Rational(1, 3)).has_value());
  CHECK(Dyadic::from_parts(1, mpz_class(5), -2, true).to_rational() == Rational(5, 4));
  CHECK_THROWS(Dyadic::from_parts(1, mpz_class(4), 0, true));
}

TEST_CASE("bit utilities reject bad ranges") {
  CHECK_THROWS(bin_range(big(5), 0, 1, 3));
  CHECK_THROWS(bin_range(big(5), 2, 1, 3));
  CHECK_THROWS(bin_range(big(5), 1, 4, 3));
  CHECK_THROWS(bin_range(big(9), 1, 1, 3));
  std::vector<BigNat> too_wide{big(16)};
  CHECK_THROWS(pack_blocks(too_wide, 4));
}
