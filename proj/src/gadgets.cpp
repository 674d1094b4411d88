#include "memnet/gadgets.hpp"

#include <array>

#include "memnet/error.hpp"

namespace memnet::gadgets {

Dyadic triangle(const Dyadic& z) {
  const Dyadic up = relu(z.mul_pow2(1));
  const Dyadic down = relu(z.mul_pow2(2) - Dyadic(2));
  return relu(up - down);
}

Dyadic triangle_iter(Dyadic z, std::size_t k) {
  for (std::size_t t = 0; t < k; ++t) z = triangle(z);
  return z;
}

Dyadic half_track_start(const BigNat& x, std::size_t n) {
  const auto e = static_cast<std::int64_t>(n);
  return Dyadic(x, -e) + Dyadic::pow2(-e - 1);
}

Dyadic quarter_track_start(const BigNat& x, std::size_t n) {
  const auto e = static_cast<std::int64_t>(n);
  return Dyadic(x, -e) + Dyadic::pow2(-e - 2);
}

int bin_bit_formula(const BigNat& x, std::size_t n, std::size_t i, int exponent_shift) {
  if (i < 1 || i > n) throw IndexError("bin_bit_formula: need 1 <= i <= n");
  if (bit_len(x) > n) throw IndexError("bin_bit_formula: x wider than n bits");
  const Dyadic hi = triangle_iter(half_track_start(x, n), i);
  const Dyadic lo = triangle_iter(quarter_track_start(x, n), i);
  const auto e = static_cast<std::int64_t>(n) + 2 - static_cast<std::int64_t>(i) + exponent_shift;
  const Dyadic bit = relu(lo - hi).mul_pow2(e);
  if (bit == Dyadic(0)) return 0;
  if (bit == Dyadic(1)) return 1;
  // Only reachable with a perturbed exponent; report a value that cannot be
  // mistaken for a bit.
  return -1;
}

LayeredNet build_triangle() {
  NetBuilder nb(1);
  const Affine z = nb.input(0);
  const Affine up = nb.relu(2 * z);
  const Affine down = nb.relu(4 * z - 2);
  nb.next_layer();
  const std::array out{up - down};
  return nb.finish(out, "triangle");
}

LayeredNet build_indicator(const BigNat& a, const BigNat& b) {
  if (sgn(a) < 0 || a >= b) throw ParameterError("indicator: need 0 <= a < b");
  NetBuilder nb(1);
  const Affine x = nb.input(0);
  const Affine below = nb.relu(Dyadic(a, 1) - 2 * x);
  const Affine above = nb.relu(2 * x - Dyadic(b, 1));
  nb.next_layer();
  const Affine g1 = nb.relu(1 - below);
  const Affine g2 = nb.relu(1 - above);
  nb.next_layer();
  const std::array out{g1 + g2 - 1};
  return nb.finish(out, "indicator");
}

LayeredNet build_distance_gate() {
  NetBuilder nb(2);
  const Affine x = nb.input(0);
  const Affine y = nb.input(1);
  const Affine below = nb.relu(2 * y - 2 * x);
  const Affine above = nb.relu(2 * x - 2 * y - 2);
  nb.next_layer();
  const Affine g1 = nb.relu(1 - below);
  const Affine g2 = nb.relu(1 - above);
  nb.next_layer();
  const std::array out{g1 + g2 - 1};
  return nb.finish(out, "distance_gate");
}

BitLane::BitLane(Affine half, Affine quarter, std::size_t total_bits, std::size_t next_bit, int exponent_shift)
    : half_(std::move(half)),
      quarter_(std::move(quarter)),
      total_bits_(total_bits),
      next_bit_(next_bit),
      exponent_shift_(exponent_shift) {}

void BitLane::emit(NetBuilder& nb, bool idle) {
  if (idle) {
    if (phase_ != 0) throw Error("internal: idling a lane mid-bit");
    half_ = nb.pass(half_);
    quarter_ = nb.pass(quarter_);
    acc_ = nb.pass(acc_);
    return;
  }
  switch (phase_) {
    case 0:
      if (next_bit_ < 1 || next_bit_ > total_bits_) throw IndexError("BitLane: no bits left to read");
      a_half_ = nb.relu(2 * half_);
      b_half_ = nb.relu(4 * half_ - 2);
      a_quarter_ = nb.relu(2 * quarter_);
      b_quarter_ = nb.relu(4 * quarter_ - 2);
      acc_ = nb.pass(acc_);
      break;
    case 1:
      half_ = nb.relu(a_half_ - b_half_);
      quarter_ = nb.relu(a_quarter_ - b_quarter_);
      acc_ = nb.pass(acc_);
      break;
    case 2: {
      const Affine on_descent = nb.relu(quarter_ - half_);
      half_ = nb.pass(half_);
      quarter_ = nb.pass(quarter_);
      acc_ = nb.pass(acc_);
      const auto e = static_cast<std::int64_t>(total_bits_) + 2 - static_cast<std::int64_t>(next_bit_) +
                     exponent_shift_;
      acc_ = 2 * acc_ + Dyadic::pow2(e) * on_descent;
      ++next_bit_;
      break;
    }
    default:
      break;
  }
  phase_ = (phase_ + 1) % 3;
}

LayeredNet build_bit_extractor(std::size_t n, std::size_t i, std::size_t j, int exponent_shift) {
  if (i < 1 || i > j || j > n) throw IndexError("bit extractor: need 1 <= i <= j <= n");
  NetBuilder nb(2);
  BitLane lane(nb.input(0), nb.input(1), n, i, exponent_shift);
  for (std::size_t step = 0; step < 3 * (j - i + 1); ++step) {
    lane.emit(nb);
    nb.next_layer();
  }
  const std::array out{lane.half(), lane.quarter(), lane.value()};
  return nb.finish(out, "bit_extractor");
}

}  // namespace memnet::gadgets
