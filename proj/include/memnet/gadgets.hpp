#pragma once

#include <cstddef>

#include "memnet/dyadic.hpp"
#include "memnet/net.hpp"
#include "memnet/net_builder.hpp"

namespace memnet::gadgets {

// Triangle map phi(z) = relu(relu(2z) - relu(4z - 2)), evaluated directly.
Dyadic triangle(const Dyadic& z);
// k-fold composition of triangle().
Dyadic triangle_iter(Dyadic z, std::size_t k);

// Input offsets of the two triangle tracks used to read an n-bit integer x:
// track "half" carries x/2^n + 2^-(n+1), track "quarter" x/2^n + 2^-(n+2).
Dyadic half_track_start(const BigNat& x, std::size_t n);
Dyadic quarter_track_start(const BigNat& x, std::size_t n);

// Bit i (1 = most significant) of x as an n-bit string, computed from the
// triangle tracks: 2^(n+2-i) * relu(phi^i(quarter) - phi^i(half)).
// `exponent_shift` perturbs the power of two; it exists so the oracle suite
// can prove it catches a wrong formula.
int bin_bit_formula(const BigNat& x, std::size_t n, std::size_t i, int exponent_shift = 0);

// Width 2, depth 2. Computes phi exactly on (-inf, 1], which contains the
// domain [0, 1] the tracks live in; the outer ReLU of phi reappears when the
// net is composed.
LayeredNet build_triangle();

// relu(1 - relu(2a - 2x)) + relu(1 - relu(2x - 2b)) - 1: equal to 1 on [a, b]
// and 0 outside [a - 1/2, b + 1/2]. Two ReLU layers plus the summing
// read-out layer.
LayeredNet build_indicator(const BigNat& a, const BigNat& b);

// Input (x, y). relu(1 - relu(2y - 2x)) + relu(1 - relu(2x - 2y - 2)) - 1:
// equal to 1 for x in [y, y+1] and 0 outside [y - 1/2, y + 3/2].
LayeredNet build_distance_gate();

// Input (phi^(i-1)(half track), phi^(i-1)(quarter track)) of an n-bit x.
// Output (phi^(j)(half), phi^(j)(quarter), bin_{i:j}(x)). Width 5; three
// ReLU layers per extracted bit and one read-out layer.
LayeredNet build_bit_extractor(std::size_t n, std::size_t i, std::size_t j, int exponent_shift = 0);

// Bit-serial reader used inside larger nets. Each emit() queues the units of
// one layer (five at most); three layers read one bit. The accumulator
// gathers bits MSB-first by Horner's rule: acc <- 2*acc + bit.
class BitLane {
 public:
  // `total_bits` is the padded width n of the encoded integer; `next_bit` is
  // the 1-based position the tracks are positioned before.
  BitLane(Affine half, Affine quarter, std::size_t total_bits, std::size_t next_bit, int exponent_shift = 0);

  // Queues one layer of work. When `idle` the lane only carries its values.
  void emit(NetBuilder& nb, bool idle = false);

  // True between bits, when the accumulator form is complete.
  bool at_bit_boundary() const { return phase_ == 0; }
  std::size_t next_bit() const { return next_bit_; }

  // Accumulated block value; valid at a bit boundary.
  const Affine& value() const { return acc_; }
  // Starts a new block with a zero accumulator.
  void reset_value() { acc_ = Affine(0); }

  const Affine& half() const { return half_; }
  const Affine& quarter() const { return quarter_; }

 private:
  Affine half_;
  Affine quarter_;
  Affine acc_{0};
  Affine a_half_, b_half_, a_quarter_, b_quarter_;
  std::size_t total_bits_;
  std::size_t next_bit_;
  int exponent_shift_;
  int phase_ = 0;
};

}  // namespace memnet::gadgets
