#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memnet/dataset.hpp"
#include "memnet/dyadic.hpp"
#include "memnet/net.hpp"

namespace memnet {

struct Projection1D {
  std::vector<Dyadic> direction;  // truncated unit vector
  Dyadic bias;                    // integer b with direction . x + b >= 1 on the data
  Dyadic scale;                   // power of two
  Rational r_realized;            // max projected value
  std::size_t truncation_bits = 0;
  std::size_t attempts = 0;
};

struct StageOne {
  Projection1D projection;
  LayeredNet net;                  // x -> scale * relu(direction . x + bias)
  std::vector<Rational> z;         // projected value of each input point
  std::vector<std::size_t> order;  // point indices sorted by z
};

// Reads MEMNET_RETRY_BUDGET, default 64.
std::size_t default_retry_budget();

// Samples directions from mt19937_64(seed) until the projections are pairwise
// distinct, then scales by the smallest power of two that makes every gap at
// least 2. Every invariant is checked exactly before returning.
StageOne project_to_line(const std::vector<std::vector<Rational>>& points, std::uint64_t seed,
                         std::size_t retry_budget);

struct CraftedCode {
  std::size_t bucket_count = 0;  // nonempty buckets
  std::size_t bucket_size = 0;   // blocks per code integer
  std::size_t rho = 0;           // bits per floor block
  std::size_t c = 0;             // bits per label block
  std::vector<BigNat> u;
  std::vector<BigNat> w;
  std::vector<BigNat> sentinels;  // filler floors of the last bucket
  std::vector<BigNat> first_floor;
  std::vector<BigNat> last_floor;
};

// ceil(sqrt(N * max(1, ceil(log2 N)))).
std::size_t default_bucket_count(std::size_t n);

// `floors` strictly increasing with gaps >= 2, `labels` in the same order.
// Sentinels are sentinel_base + 2, + 4, ...; sentinel_base defaults to the
// largest floor and must be at least that.
CraftedCode craft_codes(std::span<const BigNat> floors, std::span<const BigNat> labels, const BigNat& classes,
                        std::size_t m, std::optional<BigNat> sentinel_base = std::nullopt);

// x -> (x, w_j, u_j) for x in the floor range of bucket j, (x, 0, 0) when x is
// at least 1/2 away from every bucket range. Width 5, depth 2m + 1.
LayeredNet build_stage2(const CraftedCode& code);

// (x, w, u) -> block j of w when floor(x) equals block j of u; 0 when x is at
// least 3/2 above or 1/2 below every block of u. Width 12, depth
// 3n*max(rho, c) + 2n + 2.
LayeredNet build_stage3(std::size_t n, std::size_t rho, std::size_t c, int exponent_shift = 0);

struct SubnetInfo {
  std::size_t first = 0;  // offset in projected order
  std::size_t count = 0;
  std::size_t bucket_count = 0;
  std::size_t bucket_size = 0;
  std::size_t rho = 0;
  std::size_t c = 0;
  std::size_t stage2_depth = 0;
  std::size_t stage3_depth = 0;
  std::size_t code_bits = 0;  // max len over the code integers
};

// Stage II followed by Stage III on a contiguous run of projected points.
LayeredNet build_core(std::span<const BigNat> floors, std::span<const BigNat> labels, const BigNat& classes,
                      std::optional<std::size_t> m, const BigNat& sentinel_base, SubnetInfo& info);

struct Construction {
  std::string theorem;  // sqrt, bounded_depth, bounded_bits, regression
  std::size_t n = 0;
  std::size_t d = 0;
  BigNat classes = 0;
  Geometry geometry;
  std::uint64_t seed = 0;
  std::optional<Projection1D> projection;
  std::vector<SubnetInfo> subnets;
  std::size_t L = 0;
  std::size_t B = 0;
  std::optional<Dyadic> epsilon;
  std::optional<Dyadic> grid_low;  // regression grid origin
};

nlohmann::json to_json(const Construction& c);

struct Memorizer {
  LayeredNet net;
  Construction info;
};

struct BuildConfig {
  std::uint64_t seed = 0;
  std::size_t retry_budget = 64;
  std::optional<std::size_t> bucket_count;
};

// Labels sorted into projected order, with floors of the projected values.
struct SortedProjection {
  std::vector<BigNat> floors;
  std::vector<BigNat> labels;
};
SortedProjection sort_projection(const StageOne& s1, std::span<const BigNat> labels);

// Constant network for a single point.
LayeredNet constant_net(std::size_t input_dim, const Dyadic& value, const std::string& provenance);

Memorizer assemble_sqrt(const Dataset& ds, const BuildConfig& cfg);

// Labels are quantized to the grid lo' + eps*Z with lo' = eps*floor(lo/eps);
// the network outputs the midpoint of each label's cell. eps must be a
// positive dyadic.
Memorizer regression_wrap(const RegressionData& rd, const Dyadic& epsilon, const BuildConfig& cfg);

}  // namespace memnet
