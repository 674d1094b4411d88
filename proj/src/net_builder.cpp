#include "memnet/net_builder.hpp"

#include "memnet/error.hpp"

namespace memnet {

Affine Affine::unit(std::uint32_t index, std::uint64_t generation) {
  Affine a;
  a.terms_.emplace(index, Dyadic(1));
  a.generation_ = generation;
  return a;
}

void Affine::adopt_generation(const Affine& other) {
  if (other.is_constant()) return;
  if (!is_constant() && generation_ != other.generation_) {
    throw Error("internal: combining affine forms from different layers");
  }
  generation_ = other.generation_;
}

Affine& Affine::operator+=(const Affine& other) {
  adopt_generation(other);
  constant_ += other.constant_;
  for (const auto& [k, v] : other.terms_) {
    auto& slot = terms_[k];
    slot += v;
    if (slot.is_zero()) terms_.erase(k);
  }
  return *this;
}

Affine& Affine::operator-=(const Affine& other) {
  adopt_generation(other);
  constant_ -= other.constant_;
  for (const auto& [k, v] : other.terms_) {
    auto& slot = terms_[k];
    slot -= v;
    if (slot.is_zero()) terms_.erase(k);
  }
  return *this;
}

Affine& Affine::operator*=(const Dyadic& k) {
  if (k.is_zero()) {
    terms_.clear();
    constant_ = Dyadic();
    return *this;
  }
  constant_ *= k;
  for (auto& [idx, v] : terms_) v *= k;
  return *this;
}

NetBuilder::NetBuilder(std::size_t input_dim) : input_dim_(input_dim), current_width_(input_dim) {
  if (input_dim == 0) throw DimensionError("NetBuilder: input dimension must be positive");
}

Affine NetBuilder::input(std::size_t i) const {
  if (!layers_.empty()) throw Error("internal: inputs are only readable by the first layer");
  if (i >= input_dim_) throw DimensionError("NetBuilder: input index out of range");
  return Affine::unit(static_cast<std::uint32_t>(i), generation_);
}

Row NetBuilder::to_row(const Affine& f) const {
  if (!f.is_constant() && f.generation() != generation_) {
    throw Error("internal: affine form does not read the current layer");
  }
  Row row;
  row.bias = f.constant();
  row.entries.reserve(f.terms().size());
  for (const auto& [k, v] : f.terms()) {
    if (k >= current_width_) throw Error("internal: affine form reads a missing unit");
    row.entries.push_back({k, v, 0.0});
  }
  return row;
}

Affine NetBuilder::queue(const Affine& f, bool passthrough) {
  Row row = to_row(f);
  row.passthrough = passthrough;
  pending_.push_back(std::move(row));
  return Affine::unit(static_cast<std::uint32_t>(pending_.size() - 1), generation_ + 1);
}

Affine NetBuilder::relu(const Affine& f) {
  if (f.is_constant()) return Affine(memnet::relu(f.constant()));
  return queue(f, false);
}

Affine NetBuilder::pass(const Affine& f) {
  if (f.is_constant()) return f;
  return queue(f, true);
}

void NetBuilder::next_layer() {
  if (pending_.empty()) throw Error("internal: empty layer");
  AffineLayer layer;
  layer.in_dim = current_width_;
  layer.relu = true;
  layer.rows = std::move(pending_);
  pending_.clear();
  current_width_ = layer.rows.size();
  layers_.push_back(std::move(layer));
  ++generation_;
}

LayeredNet NetBuilder::finish(std::span<const Affine> outputs, std::string provenance) {
  if (!pending_.empty()) throw Error("internal: uncommitted units at finish");
  AffineLayer layer;
  layer.in_dim = current_width_;
  layer.relu = false;
  for (const auto& f : outputs) layer.rows.push_back(to_row(f));
  layers_.push_back(std::move(layer));
  return LayeredNet(input_dim_, std::move(layers_), std::move(provenance));
}

}  // namespace memnet
