#include "memnet/net.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "memnet/error.hpp"

namespace memnet {
namespace {

void normalize_row(Row& row, std::size_t in_dim) {
  std::sort(row.entries.begin(), row.entries.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
  std::vector<Entry> merged;
  merged.reserve(row.entries.size());
  for (auto& e : row.entries) {
    if (e.col >= in_dim) throw DimensionError("layer entry column out of range");
    if (!merged.empty() && merged.back().col == e.col) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(std::move(e));
    }
  }
  std::erase_if(merged, [](const Entry& e) { return e.weight.is_zero(); });
  for (auto& e : merged) e.weight_f = e.weight.to_double();
  row.entries = std::move(merged);
  row.bias_f = row.bias.to_double();
}

void note_param(const Dyadic& v, NetMetrics& m) {
  if (v.is_zero()) return;
  ++m.params;
  m.bits = std::max(m.bits, v.bit_complexity());
  const auto e = v.exponent();
  m.exponent_range = std::max<std::size_t>(m.exponent_range, static_cast<std::size_t>(e < 0 ? -e : e));
}

AffineLayer identity_layer(std::size_t dim, bool relu) {
  AffineLayer layer;
  layer.in_dim = dim;
  layer.relu = relu;
  layer.rows.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    layer.rows[k].entries.push_back({static_cast<std::uint32_t>(k), Dyadic(1), 1.0});
    layer.rows[k].passthrough = relu;
  }
  return layer;
}

// Turns the final affine layer into pass-through ReLU units.
void seal_output(std::vector<AffineLayer>& layers) {
  auto& last = layers.back();
  last.relu = true;
  for (auto& r : last.rows) r.passthrough = true;
}

std::vector<AffineLayer> padded_layers(const LayeredNet& net, std::size_t depth) {
  std::vector<AffineLayer> layers = net.layers();
  if (layers.size() == depth) return layers;
  const std::size_t dim = net.output_dim();
  seal_output(layers);
  while (layers.size() + 1 < depth) layers.push_back(identity_layer(dim, true));
  layers.push_back(identity_layer(dim, false));
  return layers;
}

mpz_class odd_part(const mpz_class& v) {
  mpz_class out = v;
  if (sgn(out) != 0) mpz_tdiv_q_2exp(out.get_mpz_t(), out.get_mpz_t(), mpz_scan1(out.get_mpz_t(), 0));
  return out;
}

void check_input(const LayeredNet& net, std::size_t n) {
  if (n != net.input_dim()) {
    throw DimensionError("input has dimension " + std::to_string(n) + ", network expects " +
                         std::to_string(net.input_dim()));
  }
}

std::vector<Dyadic> run_exact(const LayeredNet& net, std::vector<Dyadic> cur, const Dyadic* bias_scale,
                              const EvalOptions& opts) {
  std::vector<Dyadic> next;
  std::size_t layer_index = 0;
  for (const auto& layer : net.layers()) {
    next.resize(layer.out_dim());
    for (std::size_t r = 0; r < layer.rows.size(); ++r) {
      const Row& row = layer.rows[r];
      Dyadic& acc = next[r];
      acc = row.bias;
      if (bias_scale != nullptr) acc *= *bias_scale;
      for (const auto& e : row.entries) acc.add_product(e.weight, cur[e.col]);
      if (layer.relu && acc.sign() < 0) {
        if (opts.check_contracts && row.passthrough) {
          throw ContractViolation("pass-through unit " + std::to_string(r) + " of layer " +
                                  std::to_string(layer_index) + " received " + acc.to_string());
        }
        acc = Dyadic();
      }
    }
    std::swap(cur, next);
    ++layer_index;
  }
  return cur;
}

}  // namespace

NetMetrics compute_metrics(const std::vector<AffineLayer>& layers) {
  NetMetrics m;
  m.depth = layers.size();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i + 1 < layers.size()) m.width = std::max(m.width, layers[i].out_dim());
    for (const auto& row : layers[i].rows) {
      note_param(row.bias, m);
      for (const auto& e : row.entries) note_param(e.weight, m);
    }
  }
  return m;
}

LayeredNet::LayeredNet(std::size_t input_dim, std::vector<AffineLayer> layers, std::string provenance)
    : input_dim_(input_dim), layers_(std::move(layers)), provenance_(std::move(provenance)) {
  if (input_dim_ == 0) throw DimensionError("network input dimension must be positive");
  if (layers_.empty()) throw DimensionError("network needs at least one layer");
  std::size_t prev = input_dim_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto& layer = layers_[i];
    if (layer.in_dim != prev) {
      throw DimensionError("layer " + std::to_string(i) + " expects " + std::to_string(layer.in_dim) +
                           " inputs, previous layer provides " + std::to_string(prev));
    }
    if (layer.rows.empty()) throw DimensionError("layer " + std::to_string(i) + " has no units");
    const bool last = i + 1 == layers_.size();
    if (layer.relu == last) throw DimensionError("only the final layer may omit ReLU");
    for (auto& row : layer.rows) {
      normalize_row(row, layer.in_dim);
      if (!layer.relu) row.passthrough = false;
    }
    prev = layer.out_dim();
  }
  metrics_ = compute_metrics(layers_);
}

LayeredNet LayeredNet::with_provenance(std::string provenance) const {
  LayeredNet copy = *this;
  copy.provenance_ = std::move(provenance);
  return copy;
}

std::vector<Dyadic> eval_exact(const LayeredNet& net, std::span<const Dyadic> x, const EvalOptions& opts) {
  check_input(net, x.size());
  return run_exact(net, std::vector<Dyadic>(x.begin(), x.end()), nullptr, opts);
}

std::vector<Rational> eval_rational(const LayeredNet& net, std::span<const Rational> x, const EvalOptions& opts) {
  check_input(net, x.size());
  mpz_class scale = 1;
  for (const auto& q : x) {
    const mpz_class odd = odd_part(q.get_den());
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), odd.get_mpz_t());
  }
  std::vector<Dyadic> scaled;
  scaled.reserve(x.size());
  for (const auto& q : x) {
    const Rational v = q * scale;
    auto d = Dyadic::from_rational(v);
    if (!d) throw Error("internal: scaled input is not dyadic");
    scaled.push_back(*d);
  }
  const Dyadic bias_scale(scale);
  const auto out = run_exact(net, std::move(scaled), scale == 1 ? nullptr : &bias_scale, opts);
  std::vector<Rational> result;
  result.reserve(out.size());
  for (const auto& v : out) {
    Rational q = v.to_rational() / scale;
    q.canonicalize();
    result.push_back(std::move(q));
  }
  return result;
}

std::vector<double> eval_float(const LayeredNet& net, std::span<const double> x) {
  check_input(net, x.size());
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (const auto& layer : net.layers()) {
    next.assign(layer.out_dim(), 0.0);
    for (std::size_t r = 0; r < layer.rows.size(); ++r) {
      const Row& row = layer.rows[r];
      double acc = row.bias_f;
      for (const auto& e : row.entries) acc += e.weight_f * cur[e.col];
      next[r] = layer.relu && acc < 0.0 ? 0.0 : acc;
    }
    std::swap(cur, next);
  }
  return cur;
}

LayeredNet identity_net(std::size_t dim) {
  return LayeredNet(dim, {identity_layer(dim, false)}, "identity");
}

namespace {

void append_layers(std::vector<AffineLayer>& layers, const LayeredNet& b, Junction junction) {
  const auto& b_layers = b.layers();
  if (junction == Junction::kReluPassThrough) {
    seal_output(layers);
    layers.insert(layers.end(), b_layers.begin(), b_layers.end());
    return;
  }
  const AffineLayer tail = std::move(layers.back());
  layers.pop_back();
  const AffineLayer& head = b_layers.front();
  AffineLayer fused;
  fused.in_dim = tail.in_dim;
  fused.relu = head.relu;
  fused.rows.reserve(head.rows.size());
  for (const auto& hrow : head.rows) {
    Row row;
    row.bias = hrow.bias;
    row.passthrough = hrow.passthrough;
    std::map<std::uint32_t, Dyadic> acc;
    for (const auto& he : hrow.entries) {
      const Row& trow = tail.rows[he.col];
      row.bias.add_product(he.weight, trow.bias);
      for (const auto& te : trow.entries) acc[te.col].add_product(he.weight, te.weight);
    }
    for (auto& [col, w] : acc) row.entries.push_back({col, std::move(w), 0.0});
    fused.rows.push_back(std::move(row));
  }
  layers.push_back(std::move(fused));
  layers.insert(layers.end(), b_layers.begin() + 1, b_layers.end());
}

void check_junction(const LayeredNet& a, const LayeredNet& b) {
  if (a.output_dim() != b.input_dim()) {
    throw DimensionError("compose_serial: output dimension " + std::to_string(a.output_dim()) +
                         " does not match input dimension " + std::to_string(b.input_dim()));
  }
}

}  // namespace

LayeredNet compose_serial(const LayeredNet& a, const LayeredNet& b, Junction junction) {
  check_junction(a, b);
  std::vector<AffineLayer> layers = a.layers();
  append_layers(layers, b, junction);
  return LayeredNet(a.input_dim(), std::move(layers), a.provenance() + ">" + b.provenance());
}

LayeredNet compose_chain(std::span<const LayeredNet> nets, Junction junction, std::string provenance) {
  if (nets.empty()) throw DimensionError("compose_chain: no networks");
  std::vector<AffineLayer> layers = nets.front().layers();
  for (std::size_t i = 1; i < nets.size(); ++i) {
    check_junction(nets[i - 1], nets[i]);
    append_layers(layers, nets[i], junction);
  }
  return LayeredNet(nets.front().input_dim(), std::move(layers), std::move(provenance));
}

LayeredNet stack_parallel(std::span<const LayeredNet> nets) {
  if (nets.empty()) throw DimensionError("stack_parallel: no networks");
  const std::size_t in = nets.front().input_dim();
  std::size_t depth = 0;
  for (const auto& n : nets) {
    if (n.input_dim() != in) throw DimensionError("stack_parallel: input dimensions differ");
    depth = std::max(depth, n.layers().size());
  }
  if (nets.size() == 1) return nets.front();

  std::vector<std::vector<AffineLayer>> members;
  members.reserve(nets.size());
  for (const auto& n : nets) members.push_back(padded_layers(n, depth));

  std::vector<AffineLayer> layers(depth);
  std::string provenance = "stack(";
  for (std::size_t t = 0; t < depth; ++t) {
    AffineLayer& out = layers[t];
    out.relu = t + 1 < depth;
    out.in_dim = 0;
    for (const auto& m : members) {
      const AffineLayer& src = m[t];
      const std::uint32_t offset = t == 0 ? 0 : static_cast<std::uint32_t>(out.in_dim);
      for (const auto& r : src.rows) {
        Row row = r;
        for (auto& e : row.entries) e.col += offset;
        out.rows.push_back(std::move(row));
      }
      out.in_dim += src.in_dim;
    }
    if (t == 0) out.in_dim = in;
  }
  for (std::size_t i = 0; i < nets.size(); ++i) provenance += (i ? "," : "") + nets[i].provenance();
  return LayeredNet(in, std::move(layers), provenance + ")");
}

LayeredNet extend_identity(const LayeredNet& net, std::size_t extra, Side side) {
  if (extra == 0) return net;
  std::vector<AffineLayer> layers = net.layers();
  const auto shift = static_cast<std::uint32_t>(extra);
  for (auto& layer : layers) {
    const std::size_t prev_out = layer.in_dim;
    std::vector<Row> carried(extra);
    for (std::size_t c = 0; c < extra; ++c) {
      const auto col = static_cast<std::uint32_t>(side == Side::kPrepend ? c : prev_out + c);
      carried[c].entries.push_back({col, Dyadic(1), 1.0});
      carried[c].passthrough = layer.relu;
    }
    if (side == Side::kPrepend) {
      for (auto& row : layer.rows) {
        for (auto& e : row.entries) e.col += shift;
      }
      layer.rows.insert(layer.rows.begin(), carried.begin(), carried.end());
    } else {
      layer.rows.insert(layer.rows.end(), carried.begin(), carried.end());
    }
    layer.in_dim += extra;
  }
  return LayeredNet(net.input_dim() + extra, std::move(layers), net.provenance() + "+id" + std::to_string(extra));
}

}  // namespace memnet
