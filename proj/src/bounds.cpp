#include "memnet/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "memnet/error.hpp"
#include "memnet/net_json.hpp"
#include "memnet/parallel.hpp"

namespace memnet {
namespace {

double lg(double v) { return std::log2(std::max(v, 2.0)); }

double to_d(const Rational& q) { return q.get_d(); }
double to_d(const BigNat& n) { return n.get_d(); }

std::size_t core_depth_bound(const SubnetInfo& s) {
  const std::size_t bits = std::max(s.rho, s.c);
  return (3 * s.bucket_count + 2) + (3 * s.bucket_size * bits + 2 * s.bucket_size + 2);
}

std::size_t core_bits_bound(const SubnetInfo& s) { return s.bucket_size * std::max(s.rho, s.c) + 2; }

void add_check(AuditReport& r, std::string name, double realized, double bound, bool upper, bool binding) {
  const bool pass = upper ? realized <= bound : realized >= bound;
  r.checks.push_back({std::move(name), realized, bound, upper, pass, binding});
}

void add_ceiling(AuditReport& r, const std::string& name, double ceiling, double realized) {
  r.ceilings[name] = ceiling;
  r.ratios[name] = realized / ceiling;
}

}  // namespace

std::size_t ceil_log2(const BigNat& n) {
  if (n <= 1) return 0;
  return bit_len(BigNat(n - 1));
}

BigNat vc_upper_bits(const BigNat& W, const BigNat& B) {
  return W * B + W * static_cast<unsigned long>(ceil_log2(W));
}

BigNat lower_bound_params(std::size_t n, LowerBound kind, std::size_t L) {
  if (n < 2) throw ParameterError("lower bounds need N >= 2");
  const double logn = std::log2(static_cast<double>(n));
  switch (kind) {
    case LowerBound::kSqrt: {
      BigNat r;
      BigNat nn(static_cast<unsigned long>(n));
      mpz_sqrt(r.get_mpz_t(), nn.get_mpz_t());
      if (r * r < nn) r += 1;
      return r;
    }
    case LowerBound::kSqrtLog:
      return BigNat(static_cast<unsigned long>(std::ceil(std::sqrt(static_cast<double>(n) * logn) - 1e-9)));
    case LowerBound::kDepth:
      if (L < 1) throw ParameterError("depth lower bound needs L >= 1");
      return BigNat(static_cast<unsigned long>(std::ceil(static_cast<double>(n) / (static_cast<double>(L) * logn) - 1e-9)));
  }
  throw ParameterError("unknown lower bound");
}

Verification verify_exact(const LayeredNet& net, const std::vector<std::vector<Rational>>& points,
                          const std::vector<Rational>& targets, const Rational& tolerance) {
  if (points.size() != targets.size()) throw DimensionError("verify: point and target counts differ");
  std::vector<Rational> err(points.size());
  std::vector<char> bad(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      const Rational out = eval_rational(net, points[i]).front();
      err[i] = abs(out - targets[i]);
      bad[i] = err[i] > tolerance;
    } catch (const ContractViolation&) {
      bad[i] = 2;
    }
  });
  Verification v;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (bad[i] && v.mismatches++ == 0) v.first_failure = i;
    if (bad[i] != 2 && err[i] > v.max_error) v.max_error = err[i];
  }
  v.memorized = v.mismatches == 0;
  return v;
}

double max_error_float(const LayeredNet& net, const std::vector<std::vector<Rational>>& points,
                       const std::vector<Rational>& targets) {
  std::vector<double> err(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    std::vector<double> x;
    x.reserve(points[i].size());
    for (const auto& q : points[i]) x.push_back(q.get_d());
    err[i] = std::fabs(eval_float(net, x).front() - targets[i].get_d());
  });
  double m = 0;
  for (double e : err) m = std::isnan(e) || std::isnan(m) ? NAN : std::max(m, e);
  return m;
}

bool AuditReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.binding || c.pass; });
}

AuditReport audit(const LayeredNet& net, const Construction& info, const std::vector<std::vector<Rational>>& points,
                  const std::vector<Rational>& targets) {
  const std::string& t = info.theorem;
  if (t != "sqrt" && t != "bounded_depth" && t != "bounded_bits" && t != "regression") {
    throw ProvenanceError("unknown theorem id '" + t + "'");
  }
  AuditReport r;
  r.theorem = t;
  r.n = info.n;
  r.d = info.d;
  r.classes = info.classes;
  r.realized = net.metrics();
  r.subnets = info.subnets.size();

  Rational tolerance = 0;
  if (t == "regression") {
    if (!info.epsilon) throw ProvenanceError("regression construction without epsilon");
    tolerance = info.epsilon->to_rational() / 2;
  }
  r.verification = verify_exact(net, points, targets, tolerance);
  add_check(r, "memorized", static_cast<double>(r.verification.mismatches), 0, true, true);

  const auto& m = r.realized;
  const double n = static_cast<double>(info.n);
  const double d = static_cast<double>(info.d);
  const double lgn = lg(n);

  // Structural claims: pass/fail.
  std::size_t width_bound = 12 + kWidthSlack;
  if (t == "bounded_depth") width_bound = 12 * std::max<std::size_t>(1, info.subnets.size());
  if (t == "bounded_bits") width_bound = 14;
  add_check(r, "width", static_cast<double>(m.width), static_cast<double>(width_bound), true, true);

  std::size_t depth_bound = 1;
  std::size_t bits_bound = bit_len(info.classes);
  if (info.projection) {
    const auto& p = *info.projection;
    std::size_t cores = 0;
    for (const auto& s : info.subnets) {
      cores = t == "bounded_bits" ? cores + core_depth_bound(s) : std::max(cores, core_depth_bound(s));
      bits_bound = std::max(bits_bound, core_bits_bound(s));
    }
    depth_bound = 2 + cores;
    bits_bound = std::max({bits_bound, p.truncation_bits + 1, p.bias.bit_complexity()});
  }
  if (info.epsilon && info.grid_low) {
    bits_bound = std::max({bits_bound, info.epsilon->bit_complexity(),
                           (*info.grid_low - info.epsilon->mul_pow2(-1)).bit_complexity()});
  }
  add_check(r, "depth_structural", static_cast<double>(m.depth), static_cast<double>(depth_bound), true, true);
  add_check(r, "bits_structural", static_cast<double>(m.bits), static_cast<double>(bits_bound), true, true);

  // Asymptotic formulas with constant 1: ratios only.
  const double r_norm = std::max(1.0, std::sqrt(to_d(info.geometry.r_sq)));
  const double delta = info.geometry.delta_sq ? std::min(1.0, std::sqrt(to_d(*info.geometry.delta_sq))) : 1.0;
  const double c_count = to_d(info.classes);
  const double r_realized = info.projection ? to_d(info.projection->r_realized) : 1.0;
  const double log_r = lg(r_realized);
  const double log_c = lg(c_count);
  r.ceilings["R_realized"] = r_realized;

  if (t == "sqrt" || t == "regression") {
    const double r_formula = 10 * r_norm * n * n / delta * std::sqrt(M_PI * d);
    r.ceilings["R_formula"] = r_formula;
    if (info.projection) add_check(r, "R_realized_vs_formula", r_realized, r_formula, true, false);
    const double lead = std::sqrt(n / lgn) * std::max(log_r, log_c);
    add_ceiling(r, "depth", std::sqrt(n * lgn) + lead, static_cast<double>(m.depth));
    add_ceiling(r, "params", std::sqrt(n * lgn) + lead + d, static_cast<double>(m.params));
    add_ceiling(r, "bits", lg(d) + lead, static_cast<double>(m.bits));
  } else {
    const double r_variant = d * n * c_count * r_norm / delta;
    const double log_rv = lg(r_variant);
    r.ceilings["R_variant"] = r_variant;
    if (t == "bounded_depth") {
      const double L = static_cast<double>(info.L);
      const double lgl = std::sqrt(std::max(1.0, std::log2(L)));
      add_ceiling(r, "width", n / (L * L), static_cast<double>(m.width));
      add_ceiling(r, "depth", L / lgl * log_rv, static_cast<double>(m.depth));
      add_ceiling(r, "params", n / (L * lgl) * log_rv + d, static_cast<double>(m.params));
    } else {
      const double B = static_cast<double>(info.B);
      const double lgb = std::sqrt(std::max(1.0, std::log2(B)));
      add_ceiling(r, "bits", B / lgb * log_rv, static_cast<double>(m.bits));
      add_ceiling(r, "bits_realized_R", B / lgb * log_r, static_cast<double>(m.bits));
      add_ceiling(r, "depth", n * lgb / B * log_rv, static_cast<double>(m.depth));
    }
  }
  if (info.epsilon) r.ceilings["log2_inv_epsilon"] = -std::log2(info.epsilon->to_double());

  if (info.n >= 2) {
    const double params = static_cast<double>(m.params);
    const double lb_sqrt = to_d(lower_bound_params(info.n, LowerBound::kSqrt));
    const double lb_log = to_d(lower_bound_params(info.n, LowerBound::kSqrtLog));
    const double lb_depth = to_d(lower_bound_params(info.n, LowerBound::kDepth, m.depth));
    r.lower_bounds = {{"sqrt", lb_sqrt}, {"sqrt_log", lb_log}, {"depth", lb_depth}};
    r.ratios["params_over_lb_sqrt"] = params / lb_sqrt;
    r.ratios["params_over_lb_sqrt_log"] = params / lb_log;
    r.ratios["params_over_lb_depth"] = params / lb_depth;
    add_check(r, "params_vs_lb_sqrt", params, lb_sqrt, false, false);
  }

  const BigNat vc = vc_upper_bits(BigNat(static_cast<unsigned long>(std::max<std::size_t>(1, m.params))),
                                  BigNat(static_cast<unsigned long>(std::max<std::size_t>(1, m.bits))));
  r.vc_upper_bits = vc.get_str();
  r.kappa = n / to_d(vc);
  add_check(r, "vc_capacity", n, to_d(vc), true, false);
  return r;
}

nlohmann::json to_json(const AuditReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"realized", c.realized},
                      {"bound", c.bound},
                      {"kind", c.upper ? "upper" : "lower"},
                      {"pass", c.pass},
                      {"binding", c.binding}});
  }
  nlohmann::json j;
  j["schema"] = kAuditSchema;
  j["version"] = kAuditSchemaVersion;
  j["theorem"] = r.theorem;
  j["n"] = r.n;
  j["d"] = r.d;
  j["classes"] = r.classes.get_str();
  j["realized"] = metrics_to_json(r.realized);
  j["ceilings"] = r.ceilings;
  j["ratios"] = r.ratios;
  j["lower_bounds"] = r.lower_bounds;
  j["checks"] = std::move(checks);
  j["memorized"] = r.verification.memorized;
  j["mismatches"] = r.verification.mismatches;
  j["max_error"] = to_string(r.verification.max_error);
  j["vc_upper_bits"] = r.vc_upper_bits;
  j["kappa"] = r.kappa;
  j["subnets"] = r.subnets;
  j["width_slack"] = kWidthSlack;
  j["pass"] = r.pass();
  return j;
}

Construction construction_from_json(const nlohmann::json& j) {
  try {
    Construction c;
    c.theorem = j.at("theorem").get<std::string>();
    c.n = j.at("n").get<std::size_t>();
    c.d = j.at("d").get<std::size_t>();
    c.classes = BigNat(j.at("classes").get<std::string>(), 10);
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("delta_sq").is_null()) c.geometry.delta_sq = parse_exact(j.at("delta_sq").get<std::string>());
    c.geometry.r_sq = parse_exact(j.at("r_sq").get<std::string>());
    if (j.contains("projection")) {
      const auto& pj = j.at("projection");
      Projection1D p;
      for (const auto& v : pj.at("direction")) p.direction.push_back(dyadic_from_json(v));
      p.bias = dyadic_from_json(pj.at("bias"));
      p.scale = dyadic_from_json(pj.at("scale"));
      p.r_realized = parse_exact(pj.at("r_realized").get<std::string>());
      p.truncation_bits = pj.at("truncation_bits").get<std::size_t>();
      p.attempts = pj.at("attempts").get<std::size_t>();
      c.projection = p;
    }
    for (const auto& s : j.at("subnets")) {
      SubnetInfo si;
      si.first = s.at("first").get<std::size_t>();
      si.count = s.at("count").get<std::size_t>();
      si.bucket_count = s.at("bucket_count").get<std::size_t>();
      si.bucket_size = s.at("bucket_size").get<std::size_t>();
      si.rho = s.at("rho").get<std::size_t>();
      si.c = s.at("c").get<std::size_t>();
      si.stage2_depth = s.at("stage2_depth").get<std::size_t>();
      si.stage3_depth = s.at("stage3_depth").get<std::size_t>();
      si.code_bits = s.at("code_bits").get<std::size_t>();
      c.subnets.push_back(si);
    }
    c.L = j.value("L", std::size_t{0});
    c.B = j.value("B", std::size_t{0});
    if (j.contains("epsilon")) c.epsilon = dyadic_from_json(j.at("epsilon"));
    if (j.contains("grid_low")) c.grid_low = dyadic_from_json(j.at("grid_low"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("construction record: ") + e.what());
  }
}

}  // namespace memnet
