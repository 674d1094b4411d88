#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "memnet/dyadic.hpp"

namespace memnet {

struct Entry {
  std::uint32_t col = 0;
  Dyadic weight;
  double weight_f = 0.0;  // rounded copy used by eval_float
};

// One output unit: bias + sum(weight * input[col]). `passthrough` marks a
// ReLU unit whose pre-activation is promised to be nonnegative, so the ReLU
// acts as the identity. Checked evaluation enforces the promise.
struct Row {
  std::vector<Entry> entries;  // sorted by col, no zero weights
  Dyadic bias;
  double bias_f = 0.0;
  bool passthrough = false;
};

struct AffineLayer {
  std::size_t in_dim = 0;
  std::vector<Row> rows;
  bool relu = true;

  std::size_t out_dim() const { return rows.size(); }
};

struct NetMetrics {
  std::size_t width = 0;           // max hidden-layer size
  std::size_t depth = 0;           // number of affine layers, final one included
  std::size_t params = 0;          // nonzero weights + nonzero biases
  std::size_t bits = 0;            // max odd-mantissa length over nonzero parameters
  std::size_t exponent_range = 0;  // max |exponent| over nonzero parameters

  friend bool operator==(const NetMetrics&, const NetMetrics&) = default;
};

// Layered ReLU network: every layer but the last applies ReLU. Immutable once
// constructed; the constructor validates shapes and normalizes rows.
class LayeredNet {
 public:
  LayeredNet(std::size_t input_dim, std::vector<AffineLayer> layers, std::string provenance);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return layers_.back().out_dim(); }
  const std::vector<AffineLayer>& layers() const { return layers_; }
  const std::string& provenance() const { return provenance_; }
  const NetMetrics& metrics() const { return metrics_; }

  LayeredNet with_provenance(std::string provenance) const;

 private:
  std::size_t input_dim_;
  std::vector<AffineLayer> layers_;
  std::string provenance_;
  NetMetrics metrics_;
};

NetMetrics compute_metrics(const std::vector<AffineLayer>& layers);

struct EvalOptions {
  bool check_contracts = true;  // throw ContractViolation on negative pass-through units
};

std::vector<Dyadic> eval_exact(const LayeredNet& net, std::span<const Dyadic> x, const EvalOptions& opts = {});

// Exact evaluation on rational inputs. Uses positive homogeneity of ReLU:
// with x = X / D for odd D > 0, net(x) = net_D(X) / D where net_D has every
// bias multiplied by D, so all intermediate values stay dyadic.
std::vector<Rational> eval_rational(const LayeredNet& net, std::span<const Rational> x,
                                    const EvalOptions& opts = {});

// Same recursion in IEEE double with rounding at every step.
std::vector<double> eval_float(const LayeredNet& net, std::span<const double> x);

// Single affine layer computing the identity map.
LayeredNet identity_net(std::size_t dim);

enum class Junction {
  // a's final affine layer becomes a ReLU layer of pass-through units; valid
  // when a's outputs are nonnegative on the inputs of interest.
  kReluPassThrough,
  // a's final affine layer is multiplied into b's first layer. Always exact.
  kAffineFusion,
};

// Network computing b(a(x)). Depth is depth(a) + depth(b) for
// kReluPassThrough and one less for kAffineFusion.
LayeredNet compose_serial(const LayeredNet& a, const LayeredNet& b, Junction junction = Junction::kReluPassThrough);

// nets[n-1](...(nets[0](x))) built in one pass, every junction of the same kind.
LayeredNet compose_chain(std::span<const LayeredNet> nets, Junction junction, std::string provenance);

// Runs all nets side by side on the same input and concatenates their
// outputs. Shorter members are padded with pass-through identity layers, so
// their outputs must be nonnegative.
LayeredNet stack_parallel(std::span<const LayeredNet> nets);

enum class Side { kPrepend, kAppend };

// Adds `extra` input channels that are carried to the output unchanged by
// weight-1 pass-through units. Carried values must be nonnegative.
LayeredNet extend_identity(const LayeredNet& net, std::size_t extra, Side side);

}  // namespace memnet
