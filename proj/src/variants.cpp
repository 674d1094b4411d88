#include "memnet/variants.hpp"

#include <array>
#include <cmath>

#include "memnet/error.hpp"

namespace memnet {
namespace {

Construction base_info(const Dataset& ds, const BuildConfig& cfg, const char* theorem) {
  Construction info;
  info.theorem = theorem;
  info.n = ds.size();
  info.d = ds.dim();
  info.classes = ds.classes;
  info.geometry = ds.geometry;
  info.seed = cfg.seed;
  return info;
}

void check_range(const char* name, std::size_t v, std::size_t n) {
  if (v < 1 || v > ceil_sqrt(n)) {
    throw ParameterError(std::string(name) + " must lie in [1, " + std::to_string(ceil_sqrt(n)) + "], got " +
                         std::to_string(v));
  }
}

// Dense affine map given by integer coefficients.
LayeredNet affine_net(std::size_t in, const std::vector<std::vector<std::pair<std::uint32_t, long>>>& rows,
                      const char* provenance) {
  AffineLayer layer;
  layer.in_dim = in;
  layer.relu = false;
  for (const auto& r : rows) {
    Row row;
    for (const auto& [col, w] : r) row.entries.push_back({col, Dyadic(w), 0.0});
    layer.rows.push_back(std::move(row));
  }
  return LayeredNet(in, {std::move(layer)}, provenance);
}

}  // namespace

std::size_t ceil_sqrt(std::size_t n) {
  std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r < n) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= n) --r;
  return r;
}

std::vector<std::pair<std::size_t, std::size_t>> partition_sorted(std::size_t n, std::size_t subset) {
  if (subset == 0) throw ParameterError("subset size must be positive");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t first = 0; first < n; first += subset) out.emplace_back(first, std::min(subset, n - first));
  return out;
}

Memorizer assemble_bounded_depth(const Dataset& ds, std::size_t L, const BuildConfig& cfg) {
  check_range("L", L, ds.size());
  Construction info = base_info(ds, cfg, "bounded_depth");
  info.L = L;
  if (ds.size() == 1) return {constant_net(ds.dim(), Dyadic(ds.labels.front()), "bounded_depth"), info};

  StageOne s1 = project_to_line(ds.points, cfg.seed, cfg.retry_budget);
  const SortedProjection sp = sort_projection(s1, ds.labels);
  const std::span<const BigNat> floors(sp.floors);
  const std::span<const BigNat> labels(sp.labels);
  std::vector<LayeredNet> cores;
  for (const auto& [first, count] : partition_sorted(ds.size(), L * L)) {
    SubnetInfo sub;
    cores.push_back(build_core(floors.subspan(first, count), labels.subspan(first, count), ds.classes,
                               cfg.bucket_count, sp.floors.back(), sub));
    sub.first = first;
    info.subnets.push_back(sub);
  }
  const LayeredNet stacked = stack_parallel(cores);
  std::vector<std::pair<std::uint32_t, long>> sum;
  for (std::uint32_t k = 0; k < cores.size(); ++k) sum.emplace_back(k, 1);
  const LayeredNet head = affine_net(cores.size(), {sum}, "sum");
  info.projection = s1.projection;
  const LayeredNet body = compose_serial(stacked, head, Junction::kAffineFusion);
  LayeredNet net = compose_serial(s1.net, body, Junction::kReluPassThrough).with_provenance("bounded_depth");
  return {std::move(net), std::move(info)};
}

Memorizer assemble_bounded_bits(const Dataset& ds, std::size_t B, const BuildConfig& cfg) {
  check_range("B", B, ds.size());
  Construction info = base_info(ds, cfg, "bounded_bits");
  info.B = B;
  if (ds.size() == 1) return {constant_net(ds.dim(), Dyadic(ds.labels.front()), "bounded_bits"), info};

  StageOne s1 = project_to_line(ds.points, cfg.seed, cfg.retry_budget);
  const SortedProjection sp = sort_projection(s1, ds.labels);
  const std::span<const BigNat> floors(sp.floors);
  const std::span<const BigNat> labels(sp.labels);
  const auto runs = partition_sorted(ds.size(), B * B);

  std::vector<LayeredNet> chain{s1.net};
  chain.reserve(runs.size() + 1);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto [first, count] = runs[r];
    SubnetInfo sub;
    const LayeredNet core = build_core(floors.subspan(first, count), labels.subspan(first, count), ds.classes,
                                       cfg.bucket_count, sp.floors.back(), sub);
    sub.first = first;
    info.subnets.push_back(sub);
    const bool first_block = r == 0;
    const bool last_block = r + 1 == runs.size();
    if (first_block && last_block) {
      chain.push_back(core);
      break;
    }
    // Outputs (x, core(x)) or, past the first block, (x, core(x), y).
    const std::array<LayeredNet, 2> parts{identity_net(1), core};
    LayeredNet block = stack_parallel(parts);
    if (!first_block) block = extend_identity(block, 1, Side::kAppend);
    std::vector<std::vector<std::pair<std::uint32_t, long>>> rows;
    if (first_block) {
      rows = {{{0, 1}}, {{1, 1}}};
    } else if (last_block) {
      rows = {{{1, 1}, {2, 1}}};
    } else {
      rows = {{{0, 1}}, {{1, 1}, {2, 1}}};
    }
    const LayeredNet head = affine_net(block.output_dim(), rows, "accumulate");
    block = compose_serial(block, head, Junction::kAffineFusion);
    chain.push_back(std::move(block));
  }
  info.projection = s1.projection;
  LayeredNet net = compose_chain(chain, Junction::kReluPassThrough, "bounded_bits");
  return {std::move(net), std::move(info)};
}

}  // namespace memnet
