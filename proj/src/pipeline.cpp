#include "memnet/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include "memnet/error.hpp"
#include "memnet/gadgets.hpp"
#include "memnet/net_builder.hpp"

namespace memnet {
namespace {

// Smallest T with 2^T >= d * N^2 * sqrt(pi); 17725/10000 bounds sqrt(pi) from above.
std::size_t truncation_bits(std::size_t d, std::size_t n) {
  const mpz_class target = mpz_class(static_cast<unsigned long>(d)) * n * n * 17725;
  std::size_t t = 0;
  mpz_class lhs = 10000;
  while (lhs < target) {
    lhs <<= 1;
    ++t;
  }
  return t;
}

// Uniform integer in [-2^t, 2^t].
mpz_class draw_coordinate(std::mt19937_64& rng, std::size_t t) {
  const mpz_class bound = mpz_class(1) << t;
  for (;;) {
    mpz_class v = 0;
    std::size_t have = 0;
    while (have < t + 1) {
      const std::size_t take = std::min<std::size_t>(64, t + 1 - have);
      const std::uint64_t chunk = take == 64 ? rng() : rng() & ((std::uint64_t{1} << take) - 1);
      v = (v << take) + mpz_class(std::to_string(chunk), 10);
      have += take;
    }
    if (v > bound) continue;
    return (rng() & 1) ? mpz_class(-v) : v;
  }
}

mpz_class floor_of(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

std::size_t len_of_max(std::span<const BigNat> v) {
  std::size_t out = 0;
  for (const auto& x : v) out = std::max(out, bit_len(x));
  return out;
}

}  // namespace

std::size_t default_retry_budget() {
  const char* env = std::getenv("MEMNET_RETRY_BUDGET");
  if (env == nullptr || *env == '\0') return 64;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) throw ParameterError("MEMNET_RETRY_BUDGET must be a positive integer");
  return static_cast<std::size_t>(v);
}

StageOne project_to_line(const std::vector<std::vector<Rational>>& points, std::uint64_t seed,
                         std::size_t retry_budget) {
  if (points.empty()) throw DatasetError("no points to project");
  const std::size_t n = points.size();
  const std::size_t d = points.front().size();
  const std::size_t t = truncation_bits(d, n);
  std::mt19937_64 rng(seed);

  std::vector<Dyadic> direction(d);
  std::vector<Rational> proj(n);
  std::vector<std::size_t> order(n);
  for (std::size_t attempt = 1; attempt <= retry_budget; ++attempt) {
    std::vector<mpz_class> g(d);
    mpz_class s = 0;
    for (auto& v : g) {
      v = draw_coordinate(rng, t);
      s += v * v;
    }
    if (s == 0) continue;
    for (std::size_t k = 0; k < d; ++k) {
      mpz_class r = (g[k] * g[k]) << (2 * t);
      r /= s;
      mpz_sqrt(r.get_mpz_t(), r.get_mpz_t());
      if (sgn(g[k]) < 0) r = -r;
      direction[k] = Dyadic(r, -static_cast<std::int64_t>(t));
    }
    for (std::size_t i = 0; i < n; ++i) {
      Rational acc = 0;
      for (std::size_t k = 0; k < d; ++k) acc += direction[k].to_rational() * points[i][k];
      proj[i] = acc;
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });
    bool distinct = true;
    for (std::size_t i = 1; i < n && distinct; ++i) distinct = proj[order[i - 1]] != proj[order[i]];
    if (!distinct) continue;

    Projection1D p;
    p.direction = direction;
    p.truncation_bits = t;
    p.attempts = attempt;
    const mpz_class low = floor_of(proj[order.front()]);
    p.bias = Dyadic(mpz_class((sgn(low) < 0 ? mpz_class(-low) : mpz_class(0)) + 1));
    std::int64_t shift = 0;
    if (n > 1) {
      Rational gap = proj[order[1]] - proj[order[0]];
      for (std::size_t i = 2; i < n; ++i) gap = std::min<Rational>(gap, proj[order[i]] - proj[order[i - 1]]);
      while (gap < 2) {
        gap *= 2;
        ++shift;
      }
    }
    p.scale = Dyadic::pow2(shift);

    StageOne out{p, identity_net(1), {}, order};
    out.z.resize(n);
    const Rational scale_q = p.scale.to_rational();
    for (std::size_t i = 0; i < n; ++i) out.z[i] = scale_q * (proj[i] + p.bias.to_rational());
    out.projection.r_realized = out.z[order.back()];

    // Exact check of the stage invariants.
    for (std::size_t i = 0; i < n; ++i) {
      if (sgn(out.z[order[i]]) < 0) throw Error("internal: negative projected value");
      if (i > 0 && out.z[order[i]] - out.z[order[i - 1]] < 2) throw Error("internal: projected gap below 2");
    }

    AffineLayer first;
    first.in_dim = d;
    first.rows.resize(1);
    for (std::size_t k = 0; k < d; ++k) {
      first.rows[0].entries.push_back({static_cast<std::uint32_t>(k), direction[k], 0.0});
    }
    first.rows[0].bias = p.bias;
    AffineLayer second;
    second.in_dim = 1;
    second.relu = false;
    second.rows.resize(1);
    second.rows[0].entries.push_back({0, p.scale, 0.0});
    out.net = LayeredNet(d, {std::move(first), std::move(second)}, "stage1");
    return out;
  }
  throw ProjectionSearchExhausted("no direction with distinct projections after " + std::to_string(retry_budget) +
                                  " attempts");
}

std::size_t default_bucket_count(std::size_t n) {
  if (n <= 1) return 1;
  std::size_t lg = 0;
  while ((std::size_t{1} << lg) < n) ++lg;
  const std::size_t target = n * std::max<std::size_t>(1, lg);
  std::size_t m = static_cast<std::size_t>(std::sqrt(static_cast<double>(target)));
  while (m * m < target) ++m;
  while (m > 1 && (m - 1) * (m - 1) >= target) --m;
  return std::min(m, n);
}

CraftedCode craft_codes(std::span<const BigNat> floors, std::span<const BigNat> labels, const BigNat& classes,
                        std::size_t m, std::optional<BigNat> sentinel_base) {
  const std::size_t n = floors.size();
  if (n == 0 || labels.size() != n) throw ParameterError("craft_codes: need one label per floor");
  if (m < 1 || m > n) throw ParameterError("craft_codes: bucket count must lie in [1, N]");
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(floors[i]) < 0) throw ParameterError("craft_codes: negative floor");
    if (i > 0 && floors[i] - floors[i - 1] < 2) throw ParameterError("craft_codes: floors closer than 2");
    if (labels[i] < 1 || labels[i] > classes) throw LabelRangeError("craft_codes: label outside [1, C]");
  }
  const BigNat base = sentinel_base.value_or(floors.back());
  if (base < floors.back()) throw ParameterError("craft_codes: sentinel base below the largest floor");

  CraftedCode code;
  code.bucket_size = (n + m - 1) / m;
  code.bucket_count = (n + code.bucket_size - 1) / code.bucket_size;
  const std::size_t k = code.bucket_size;
  const std::size_t fill = code.bucket_count * k - n;
  for (std::size_t t = 1; t <= fill; ++t) code.sentinels.push_back(base + 2 * t);

  BigNat top = floors.back();
  if (!code.sentinels.empty()) top = std::max(top, code.sentinels.back());
  code.rho = std::max<std::size_t>(1, bit_len(top));
  code.c = bit_len(classes);

  std::vector<BigNat> fb(k), wb(k);
  for (std::size_t j = 0; j < code.bucket_count; ++j) {
    const std::size_t lo = j * k;
    const std::size_t hi = std::min(n, lo + k);
    std::size_t s = 0;
    for (std::size_t t = 0; t < k; ++t) {
      if (lo + t < hi) {
        fb[t] = floors[lo + t];
        wb[t] = labels[lo + t];
      } else {
        fb[t] = code.sentinels[s++];
        wb[t] = 0;
      }
    }
    code.u.push_back(pack_blocks(fb, code.rho));
    code.w.push_back(pack_blocks(wb, code.c));
    code.first_floor.push_back(floors[lo]);
    code.last_floor.push_back(floors[hi - 1]);
  }
  return code;
}

LayeredNet build_stage2(const CraftedCode& code) {
  NetBuilder nb(1);
  Affine x = nb.input(0);
  Affine yw = 0;
  Affine yu = 0;
  for (std::size_t j = 0; j < code.bucket_count; ++j) {
    const Dyadic a(code.first_floor[j]);
    const Dyadic b(mpz_class(code.last_floor[j] + 1));
    const Affine below = nb.relu(2 * a - 2 * x);
    const Affine above = nb.relu(2 * x - 2 * b);
    x = nb.pass(x);
    yw = nb.pass(yw);
    yu = nb.pass(yu);
    nb.next_layer();
    const Affine g1 = nb.relu(1 - below);
    const Affine g2 = nb.relu(1 - above);
    x = nb.pass(x);
    yw = nb.pass(yw);
    yu = nb.pass(yu);
    nb.next_layer();
    const Affine ind = g1 + g2 - 1;
    yw += Dyadic(code.w[j]) * ind;
    yu += Dyadic(code.u[j]) * ind;
  }
  const std::array out{x, yw, yu};
  return nb.finish(out, "stage2");
}

LayeredNet build_stage3(std::size_t n, std::size_t rho, std::size_t c, int exponent_shift) {
  if (n == 0 || rho == 0 || c == 0) throw ParameterError("stage3: n, rho and c must be positive");
  const auto wu = static_cast<std::int64_t>(n * rho);
  const auto ww = static_cast<std::int64_t>(n * c);
  NetBuilder nb(3);
  Affine x = nb.pass(nb.input(0));
  const Affine w = nb.input(1);
  const Affine u = nb.input(2);
  const Affine hu = nb.relu(Dyadic::pow2(-wu) * u + Dyadic::pow2(-wu - 1));
  const Affine qu = nb.relu(Dyadic::pow2(-wu) * u + Dyadic::pow2(-wu - 2));
  const Affine hw = nb.relu(Dyadic::pow2(-ww) * w + Dyadic::pow2(-ww - 1));
  const Affine qw = nb.relu(Dyadic::pow2(-ww) * w + Dyadic::pow2(-ww - 2));
  nb.next_layer();

  gadgets::BitLane lane_u(hu, qu, n * rho, 1, exponent_shift);
  gadgets::BitLane lane_w(hw, qw, n * c, 1, exponent_shift);
  const std::size_t bits = std::max(rho, c);
  Affine y = 0;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t step = 0; step < 3 * bits; ++step) {
      const std::size_t bit = step / 3;
      lane_u.emit(nb, bit >= rho);
      lane_w.emit(nb, bit >= c);
      x = nb.pass(x);
      y = nb.pass(y);
      nb.next_layer();
    }
    const Affine au = lane_u.value();
    const Affine aw = lane_w.value();
    lane_u.reset_value();
    lane_w.reset_value();
    const Affine p = nb.relu(2 * au - 2 * x);
    const Affine q = nb.relu(2 * x - 2 * au - 2);
    const Affine aw_next = nb.pass(aw);
    lane_u.emit(nb, true);
    lane_w.emit(nb, true);
    x = nb.pass(x);
    y = nb.pass(y);
    nb.next_layer();
    const Affine gated = nb.relu(aw_next - Dyadic::pow2(static_cast<std::int64_t>(c) + 1) * (p + q));
    lane_u.emit(nb, true);
    lane_w.emit(nb, true);
    x = nb.pass(x);
    y = nb.pass(y);
    nb.next_layer();
    y += gated;
  }
  const std::array out{y};
  return nb.finish(out, "stage3");
}

LayeredNet build_core(std::span<const BigNat> floors, std::span<const BigNat> labels, const BigNat& classes,
                      std::optional<std::size_t> m, const BigNat& sentinel_base, SubnetInfo& info) {
  const std::size_t buckets = std::min(m.value_or(default_bucket_count(floors.size())), floors.size());
  const CraftedCode code = craft_codes(floors, labels, classes, buckets, sentinel_base);
  const LayeredNet s2 = build_stage2(code);
  const LayeredNet s3 = build_stage3(code.bucket_size, code.rho, code.c);
  info.count = floors.size();
  info.bucket_count = code.bucket_count;
  info.bucket_size = code.bucket_size;
  info.rho = code.rho;
  info.c = code.c;
  info.stage2_depth = s2.metrics().depth;
  info.stage3_depth = s3.metrics().depth;
  info.code_bits = std::max(len_of_max(code.u), len_of_max(code.w));
  return compose_serial(s2, s3, Junction::kReluPassThrough).with_provenance("core");
}

SortedProjection sort_projection(const StageOne& s1, std::span<const BigNat> labels) {
  SortedProjection out;
  out.floors.reserve(s1.order.size());
  out.labels.reserve(s1.order.size());
  for (const std::size_t i : s1.order) {
    out.floors.push_back(floor_of(s1.z[i]));
    out.labels.push_back(labels[i]);
  }
  return out;
}

LayeredNet constant_net(std::size_t input_dim, const Dyadic& value, const std::string& provenance) {
  AffineLayer layer;
  layer.in_dim = input_dim;
  layer.relu = false;
  layer.rows.resize(1);
  layer.rows[0].bias = value;
  return LayeredNet(input_dim, {std::move(layer)}, provenance);
}

nlohmann::json to_json(const Construction& c) {
  nlohmann::json j;
  j["theorem"] = c.theorem;
  j["n"] = c.n;
  j["d"] = c.d;
  j["classes"] = c.classes.get_str();
  j["seed"] = c.seed;
  j["delta_sq"] = c.geometry.delta_sq ? nlohmann::json(to_string(*c.geometry.delta_sq)) : nlohmann::json();
  j["r_sq"] = to_string(c.geometry.r_sq);
  if (c.projection) {
    const auto& p = *c.projection;
    nlohmann::json dir = nlohmann::json::array();
    for (const auto& v : p.direction) dir.push_back(to_json(v));
    j["projection"] = {{"direction", dir},
                       {"bias", to_json(p.bias)},
                       {"scale", to_json(p.scale)},
                       {"r_realized", to_string(p.r_realized)},
                       {"truncation_bits", p.truncation_bits},
                       {"attempts", p.attempts}};
  }
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : c.subnets) {
    subs.push_back({{"first", s.first},
                    {"count", s.count},
                    {"bucket_count", s.bucket_count},
                    {"bucket_size", s.bucket_size},
                    {"rho", s.rho},
                    {"c", s.c},
                    {"stage2_depth", s.stage2_depth},
                    {"stage3_depth", s.stage3_depth},
                    {"code_bits", s.code_bits}});
  }
  j["subnets"] = subs;
  if (c.L) j["L"] = c.L;
  if (c.B) j["B"] = c.B;
  if (c.epsilon) j["epsilon"] = to_json(*c.epsilon);
  if (c.grid_low) j["grid_low"] = to_json(*c.grid_low);
  return j;
}

Memorizer assemble_sqrt(const Dataset& ds, const BuildConfig& cfg) {
  Construction info;
  info.theorem = "sqrt";
  info.n = ds.size();
  info.d = ds.dim();
  info.classes = ds.classes;
  info.geometry = ds.geometry;
  info.seed = cfg.seed;
  if (ds.size() == 1) {
    return {constant_net(ds.dim(), Dyadic(ds.labels.front()), "sqrt"), info};
  }
  StageOne s1 = project_to_line(ds.points, cfg.seed, cfg.retry_budget);
  const SortedProjection sp = sort_projection(s1, ds.labels);
  SubnetInfo sub;
  const LayeredNet core = build_core(sp.floors, sp.labels, ds.classes, cfg.bucket_count, sp.floors.back(), sub);
  info.subnets.push_back(sub);
  info.projection = s1.projection;
  LayeredNet net = compose_serial(s1.net, core, Junction::kReluPassThrough).with_provenance("sqrt");
  return {std::move(net), std::move(info)};
}

Memorizer regression_wrap(const RegressionData& rd, const Dyadic& epsilon, const BuildConfig& cfg) {
  if (epsilon.sign() <= 0) throw ParameterError("epsilon must be positive");
  const Rational eps = epsilon.to_rational();
  Rational lo = rd.targets.front();
  Rational hi = lo;
  for (const auto& y : rd.targets) {
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  const mpz_class lo_cells = floor_of(lo / eps);
  const Dyadic grid_low = Dyadic(lo_cells) * epsilon;
  const Rational span = (hi - grid_low.to_rational()) / eps;
  mpz_class classes = floor_of(span);
  if (Rational(classes) != span || classes == 0) classes += 1;

  Dataset ds;
  ds.points = rd.points;
  ds.geometry = rd.geometry;
  ds.classes = classes;
  for (const auto& y : rd.targets) {
    mpz_class q = floor_of((y - grid_low.to_rational()) / eps) + 1;
    if (q > classes) q = classes;
    ds.labels.push_back(q);
  }
  Memorizer m = assemble_sqrt(ds, cfg);
  // class q -> grid_low + eps*q - eps/2
  const Dyadic offset = grid_low - epsilon.mul_pow2(-1);
  AffineLayer head;
  head.in_dim = 1;
  head.relu = false;
  head.rows.resize(1);
  head.rows[0].entries.push_back({0, epsilon, 0.0});
  head.rows[0].bias = offset;
  const LayeredNet head_net(1, {std::move(head)}, "midpoint");
  m.net = compose_serial(m.net, head_net, Junction::kAffineFusion).with_provenance("regression");
  m.info.theorem = "regression";
  m.info.epsilon = epsilon;
  m.info.grid_low = grid_low;
  return m;
}

}  // namespace memnet
