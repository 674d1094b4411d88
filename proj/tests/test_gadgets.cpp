#include <vector>

#include "doctest.h"
#include "memnet/error.hpp"
#include "memnet/gadgets.hpp"

using namespace memnet;
using namespace memnet::gadgets;

namespace {

Rational at(const LayeredNet& net, std::vector<Rational> x, std::size_t k = 0) { return eval_rational(net, x)[k]; }

}  // namespace

TEST_CASE("indicator worked values") {
  const LayeredNet f = build_indicator(BigNat(2), BigNat(5));
  CHECK(f.metrics().depth == 3);
  CHECK(at(f, {Rational(14, 10)}) == 0);
  CHECK(at(f, {Rational(56, 10)}) == 0);
  CHECK(at(f, {Rational(21, 4)}) == Rational(1, 2));
  CHECK(at(f, {Rational(2)}) == 1);
  CHECK(at(f, {Rational(5)}) == 1);
  CHECK(at(f, {Rational(7, 2)}) == 1);
  CHECK(at(f, {Rational(3, 2)}) == 0);
  CHECK(at(f, {Rational(11, 2)}) == 0);
  CHECK(at(f, {Rational(-100)}) == 0);
  CHECK(at(f, {Rational(100)}) == 0);
}

TEST_CASE("distance gate worked values") {
  const LayeredNet g = build_distance_gate();
  CHECK(at(g, {Rational(7, 2), Rational(3)}) == 1);
  CHECK(at(g, {Rational(1), Rational(3)}) == 0);
  CHECK(at(g, {Rational(17, 4), Rational(3)}) == Rational(1, 2));
  // The plateau is [y, y+1] and the zero region starts at y + 3/2, so a point
  // 7/4 above y is already zero.
  CHECK(at(g, {Rational(19, 4), Rational(3)}) == 0);
  CHECK(at(g, {Rational(3), Rational(3)}) == 1);
  CHECK(at(g, {Rational(4), Rational(3)}) == 1);
  CHECK(at(g, {Rational(5, 2), Rational(3)}) == 0);
}

TEST_CASE("bit formula") {
  CHECK(bin_bit_formula(BigNat(5), 3, 1) == 1);
  CHECK(bin_bit_formula(BigNat(5), 3, 2) == 0);
  CHECK(bin_bit_formula(BigNat(5), 3, 3) == 1);
  for (unsigned long x = 0; x < 256; ++x) {
    for (std::size_t i = 1; i <= 8; ++i) {
      CHECK(bin_bit_formula(BigNat(x), 8, i) == static_cast<int>((x >> (8 - i)) & 1));
    }
  }
  CHECK(bin_bit_formula(BigNat(5), 3, 1, 1) != 1);
}

TEST_CASE("triangle iterates") {
  CHECK(triangle(Dyadic(mpz_class(1), -2)) == Dyadic(mpz_class(1), -1));
  CHECK(triangle_iter(Dyadic(mpz_class(1), -3), 2) == Dyadic(mpz_class(1), -1));
  CHECK(triangle(Dyadic(2)) == Dyadic(0));
  CHECK(triangle(Dyadic(-1)) == Dyadic(0));
}

TEST_CASE("bit extractor") {
  auto extract = [](std::size_t n, std::size_t i, std::size_t j, unsigned long x) {
    const LayeredNet e = build_bit_extractor(n, i, j);
    const Dyadic h = triangle_iter(half_track_start(BigNat(x), n), i - 1);
    const Dyadic q = triangle_iter(quarter_track_start(BigNat(x), n), i - 1);
    std::vector<Dyadic> in{h, q};
    const auto out = eval_exact(e, in);
    CHECK(out[0] == triangle_iter(half_track_start(BigNat(x), n), j));
    CHECK(out[1] == triangle_iter(quarter_track_start(BigNat(x), n), j));
    return out[2];
  };
  CHECK(extract(4, 1, 4, 11) == Dyadic(11));
  CHECK(extract(3, 2, 3, 5) == Dyadic(1));
  CHECK(extract(3, 1, 1, 5) == Dyadic(1));
  const LayeredNet e = build_bit_extractor(6, 2, 5);
  CHECK(e.metrics().width <= 5);
  CHECK(e.metrics().depth == 3 * 4 + 1);
  for (unsigned long x = 0; x < 64; ++x) CHECK(extract(6, 2, 5, x) == Dyadic(static_cast<long>((x >> 1) & 15)));
}
