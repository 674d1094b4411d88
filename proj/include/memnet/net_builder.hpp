#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "memnet/net.hpp"

namespace memnet {

// Affine form over the units of one layer: constant + sum(coef * unit).
// Forms carry the generation of the layer they read from; constants fit any
// generation.
class Affine {
 public:
  Affine() = default;
  Affine(long c) : constant_(c) {}  // NOLINT(google-explicit-constructor)
  Affine(const Dyadic& c) : constant_(c) {}  // NOLINT(google-explicit-constructor)

  static Affine unit(std::uint32_t index, std::uint64_t generation);

  bool is_constant() const { return terms_.empty(); }
  const Dyadic& constant() const { return constant_; }
  const std::map<std::uint32_t, Dyadic>& terms() const { return terms_; }
  std::uint64_t generation() const { return generation_; }

  Affine& operator+=(const Affine& other);
  Affine& operator-=(const Affine& other);
  Affine& operator*=(const Dyadic& k);

  friend Affine operator+(Affine a, const Affine& b) { return a += b; }
  friend Affine operator-(Affine a, const Affine& b) { return a -= b; }
  friend Affine operator*(const Dyadic& k, Affine a) { return a *= k; }
  friend Affine operator*(Affine a, const Dyadic& k) { return a *= k; }

 private:
  void adopt_generation(const Affine& other);

  std::map<std::uint32_t, Dyadic> terms_;
  Dyadic constant_;
  std::uint64_t generation_ = 0;
};

// Emits a LayeredNet one layer at a time. Each call to relu()/pass() queues
// a unit of the next layer and returns the form that reads it; next_layer()
// commits the queue. Constant forms never occupy a unit.
class NetBuilder {
 public:
  explicit NetBuilder(std::size_t input_dim);

  Affine input(std::size_t i) const;

  // Unit computing max(0, f).
  Affine relu(const Affine& f);
  // Unit computing f, which the caller promises is nonnegative.
  Affine pass(const Affine& f);
  void next_layer();

  std::size_t depth() const { return layers_.size(); }
  LayeredNet finish(std::span<const Affine> outputs, std::string provenance);

 private:
  Affine queue(const Affine& f, bool passthrough);
  Row to_row(const Affine& f) const;

  std::size_t input_dim_;
  std::size_t current_width_;
  std::uint64_t generation_ = 1;
  std::vector<AffineLayer> layers_;
  std::vector<Row> pending_;
};

}  // namespace memnet
