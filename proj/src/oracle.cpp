#include "memnet/oracle.hpp"

#include <array>
#include <functional>
#include <optional>

#include "memnet/error.hpp"
#include "memnet/gadgets.hpp"
#include "memnet/parallel.hpp"
#include "memnet/pipeline.hpp"

namespace memnet {
namespace {

using Witness = std::optional<nlohmann::json>;

// Runs `count` independent checks; keeps the witness with the lowest index so
// the summary does not depend on scheduling.
void sweep(OracleResult& r, std::size_t count, const std::function<Witness(std::size_t)>& check) {
  std::vector<Witness> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = check(i); });
  r.checks += count;
  for (auto& w : out) {
    if (!w) continue;
    if (r.mismatches++ == 0) r.witness = std::move(*w);
  }
}

void expect(OracleResult& r, bool ok, nlohmann::json witness) {
  ++r.checks;
  if (ok) return;
  if (r.mismatches++ == 0) r.witness = std::move(witness);
}

Dyadic quarter(long q) { return Dyadic(q).mul_pow2(-2); }

// Closed form of phi on [0, 1]: 2z, then 2 - 2z.
Dyadic phi_closed(const Dyadic& z) { return z <= Dyadic(1).mul_pow2(-1) ? z.mul_pow2(1) : Dyadic(2) - z.mul_pow2(1); }

Dyadic one_input(const LayeredNet& net, const Dyadic& x) {
  const std::array in{x};
  return eval_exact(net, in).front();
}

// relu(1 - relu(2a - 2x)) + relu(1 - relu(2x - 2b)) - 1, evaluated directly.
Dyadic ramp_formula(const Dyadic& a, const Dyadic& b, const Dyadic& x) {
  const Dyadic g1 = relu(Dyadic(1) - relu(a.mul_pow2(1) - x.mul_pow2(1)));
  const Dyadic g2 = relu(Dyadic(1) - relu(x.mul_pow2(1) - b.mul_pow2(1)));
  return g1 + g2 - Dyadic(1);
}

void suite_triangle(OracleResult& r) {
  const std::size_t g = r.n_max;
  const std::size_t points = (std::size_t{1} << g) + 1;
  const LayeredNet tri = gadgets::build_triangle();
  expect(r, tri.metrics().width == 2 && tri.metrics().depth == 2, {{"metrics", "triangle width/depth"}});
  expect(r, one_input(tri, Dyadic(0)) == Dyadic(0), {{"z", "0"}});
  expect(r, one_input(tri, Dyadic(1).mul_pow2(-1)) == Dyadic(1), {{"z", "1/2"}});
  expect(r, one_input(tri, Dyadic(1)) == Dyadic(0), {{"z", "1"}});
  sweep(r, points, [&](std::size_t j) -> Witness {
    const Dyadic z = Dyadic(mpz_class(static_cast<unsigned long>(j)), -static_cast<std::int64_t>(g));
    if (gadgets::triangle(z) != phi_closed(z)) return nlohmann::json{{"z", z.to_string()}, {"k", 1}};
    return std::nullopt;
  });
  LayeredNet composed = tri;
  for (std::size_t k = 1; k <= g; ++k) {
    if (k > 1) composed = compose_serial(composed, tri, Junction::kReluPassThrough);
    expect(r, composed.metrics().depth == 2 * k, {{"metrics", "composed depth"}, {"k", k}});
    sweep(r, points, [&](std::size_t j) -> Witness {
      const Dyadic z = Dyadic(mpz_class(static_cast<unsigned long>(j)), -static_cast<std::int64_t>(g));
      const Dyadic got = one_input(composed, z);
      const Dyadic want = gadgets::triangle_iter(z, k);
      if (got != want) {
        return nlohmann::json{{"z", z.to_string()}, {"k", k}, {"net", got.to_string()}, {"formula", want.to_string()}};
      }
      return std::nullopt;
    });
  }
}

void suite_indicator(OracleResult& r) {
  for (long b = 1; b <= static_cast<long>(r.n_max); ++b) {
    for (long a = 0; a < b; ++a) {
      const LayeredNet net = gadgets::build_indicator(mpz_class(a), mpz_class(b));
      const auto& m = net.metrics();
      expect(r, m.width == 2 && m.depth == 3 && m.bits <= bit_len(mpz_class(b)),
             {{"metrics", "indicator"}, {"a", a}, {"b", b}});
      const long lo = 4 * (a - 3);
      const long count = 4 * (b + 3) - lo + 1;
      sweep(r, static_cast<std::size_t>(count), [&](std::size_t s) -> Witness {
        const Dyadic x = quarter(lo + static_cast<long>(s));
        const Dyadic got = one_input(net, x);
        const Dyadic want = ramp_formula(Dyadic(a), Dyadic(b), x);
        bool ok = got == want && got >= Dyadic(0) && got <= Dyadic(1);
        if (x >= Dyadic(a) && x <= Dyadic(b)) ok = ok && got == Dyadic(1);
        if (x < Dyadic(a) - quarter(2) || x > Dyadic(b) + quarter(2)) ok = ok && got == Dyadic(0);
        if (ok) return std::nullopt;
        return nlohmann::json{{"a", a}, {"b", b}, {"x", x.to_string()}, {"net", got.to_string()},
                              {"formula", want.to_string()}};
      });
    }
  }
}

void suite_distance(OracleResult& r) {
  const LayeredNet net = gadgets::build_distance_gate();
  const auto& m = net.metrics();
  expect(r, m.width == 2 && m.depth == 3 && m.bits <= 2, {{"metrics", "distance gate"}});
  const long ys = 4 * static_cast<long>(r.n_max) + 1;
  const long xs = 4 * 7 + 1;  // x in [y - 3, (y + 1) + 3]
  sweep(r, static_cast<std::size_t>(ys * xs), [&](std::size_t s) -> Witness {
    const long yq = static_cast<long>(s) / xs;
    const long xq = yq - 12 + static_cast<long>(s) % xs;
    const Dyadic y = quarter(yq);
    const Dyadic x = quarter(xq);
    const std::array in{x, y};
    const Dyadic got = eval_exact(net, in).front();
    const Dyadic want = ramp_formula(y, y + Dyadic(1), x);
    bool ok = got == want && got >= Dyadic(0) && got <= Dyadic(1);
    if (x >= y && x <= y + Dyadic(1)) ok = ok && got == Dyadic(1);
    if (x < y - quarter(2) || x > y + quarter(6)) ok = ok && got == Dyadic(0);
    if (ok) return std::nullopt;
    return nlohmann::json{{"x", x.to_string()}, {"y", y.to_string()}, {"net", got.to_string()},
                          {"formula", want.to_string()}};
  });
}

void suite_bits(OracleResult& r, int shift) {
  for (std::size_t n = 1; n <= r.n_max; ++n) {
    const std::size_t xs = std::size_t{1} << n;
    sweep(r, xs * n, [&](std::size_t s) -> Witness {
      const BigNat x(static_cast<unsigned long>(s / n));
      const std::size_t i = s % n + 1;
      const int got = gadgets::bin_bit_formula(x, n, i, shift);
      const BigNat want = bin_range(x, i, i, n);
      if (BigNat(got) == want) return std::nullopt;
      return nlohmann::json{{"check", "bin_bit_formula"}, {"x", x.get_str()}, {"n", n}, {"i", i}, {"formula", got},
                            {"bin_range", want.get_str()}};
    });
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = i; j <= n; ++j) {
        const LayeredNet net = gadgets::build_bit_extractor(n, i, j, shift);
        const auto& m = net.metrics();
        expect(r, m.width <= 5 && m.depth == 3 * (j - i + 1) + 1 && m.bits <= n + 2,
               {{"metrics", "bit extractor"}, {"n", n}, {"i", i}, {"j", j}});
        sweep(r, xs, [&](std::size_t xv) -> Witness {
          const BigNat x(static_cast<unsigned long>(xv));
          const Dyadic h = gadgets::triangle_iter(gadgets::half_track_start(x, n), i - 1);
          const Dyadic q = gadgets::triangle_iter(gadgets::quarter_track_start(x, n), i - 1);
          const std::array in{h, q};
          const auto out = eval_exact(net, in);
          const BigNat want = bin_range(x, i, j, n);
          const bool ok = out[2] == Dyadic(want) &&
                          out[0] == gadgets::triangle_iter(h, j - i + 1) &&
                          out[1] == gadgets::triangle_iter(q, j - i + 1);
          if (ok) return std::nullopt;
          return nlohmann::json{{"check", "bit_extractor"}, {"x", x.get_str()}, {"n", n}, {"i", i}, {"j", j},
                                {"net", out[2].to_string()}, {"bin_range", want.get_str()}};
        });
      }
    }
  }
}

// Every ordered n-tuple over [0, 2^bits) whose entries are pairwise >= gap apart.
std::vector<std::vector<long>> tuples(std::size_t n, std::size_t bits, long gap) {
  std::vector<std::vector<long>> out{{}};
  const long top = 1L << bits;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::vector<long>> next;
    for (const auto& t : out) {
      for (long v = 0; v < top; ++v) {
        bool ok = true;
        for (long e : t) ok = ok && (v - e >= gap || e - v >= gap);
        if (!ok) continue;
        auto u = t;
        u.push_back(v);
        next.push_back(std::move(u));
      }
    }
    out = std::move(next);
  }
  return out;
}

void suite_stage3(OracleResult& r, int shift) {
  struct Shape {
    std::size_t n, rho, c;
  };
  std::vector<Shape> shapes;
  for (std::size_t rho = 1; rho <= std::min<std::size_t>(4, r.n_max); ++rho) {
    for (std::size_t c = 1; c <= 2; ++c) shapes.push_back({1, rho, c});
    for (std::size_t c = 1; c <= 2; ++c) shapes.push_back({2, rho, c});
    if (rho <= 3) shapes.push_back({3, rho, 1});
  }
  for (const auto& sh : shapes) {
    const LayeredNet net = build_stage3(sh.n, sh.rho, sh.c, shift);
    const auto& m = net.metrics();
    const std::size_t depth = 3 * sh.n * std::max(sh.rho, sh.c) + 2 * sh.n + 2;
    expect(r, m.width <= 12 && m.depth == depth,
           {{"metrics", "stage3"}, {"n", sh.n}, {"rho", sh.rho}, {"c", sh.c}, {"depth", m.depth}});
    const auto us = tuples(sh.n, sh.rho, 2);
    const auto ws = tuples(sh.n, sh.c, 0);
    const long x_top = 4 * ((1L << sh.rho) + 2);
    sweep(r, us.size() * ws.size(), [&](std::size_t s) -> Witness {
      const auto& ub = us[s / ws.size()];
      const auto& wb = ws[s % ws.size()];
      std::vector<BigNat> ubig(ub.begin(), ub.end());
      std::vector<BigNat> wbig(wb.begin(), wb.end());
      const Dyadic u(pack_blocks(ubig, sh.rho));
      const Dyadic w(pack_blocks(wbig, sh.c));
      for (long xq = 0; xq <= x_top; ++xq) {
        const Dyadic x = quarter(xq);
        std::optional<long> want;
        bool far = true;
        for (std::size_t t = 0; t < sh.n; ++t) {
          if (x >= Dyadic(ub[t]) && x < Dyadic(ub[t] + 1)) want = wb[t];
          if (!(x >= Dyadic(ub[t]) + quarter(6) || x <= Dyadic(ub[t]) - quarter(2))) far = false;
        }
        if (far) want = 0;
        if (!want) continue;
        const std::array in{x, w, u};
        const Dyadic got = eval_exact(net, in).front();
        if (got != Dyadic(*want)) {
          return nlohmann::json{{"n", sh.n}, {"rho", sh.rho}, {"c", sh.c}, {"u", u.to_string()},
                                {"w", w.to_string()}, {"x", x.to_string()}, {"net", got.to_string()},
                                {"expected", *want}};
        }
      }
      return std::nullopt;
    });
  }
}

}  // namespace

OracleResult run_oracle(const std::string& suite, std::size_t n_max, int exponent_shift) {
  if (n_max < 1 || n_max > kOracleMaxN) {
    throw ParameterError("n-max must lie in [1, " + std::to_string(kOracleMaxN) + "]");
  }
  OracleResult r;
  r.suite = suite;
  r.n_max = n_max;
  if (suite == "triangle") {
    suite_triangle(r);
  } else if (suite == "indicator") {
    suite_indicator(r);
  } else if (suite == "distance") {
    suite_distance(r);
  } else if (suite == "bits") {
    suite_bits(r, exponent_shift);
  } else if (suite == "stage3") {
    suite_stage3(r, exponent_shift);
  } else {
    throw ParameterError("unknown oracle suite '" + suite + "'");
  }
  return r;
}

nlohmann::json to_json(const OracleResult& r) {
  return {{"suite", r.suite},   {"n_max", r.n_max},     {"checks", r.checks},
          {"mismatches", r.mismatches}, {"pass", r.pass()}, {"witness", r.witness}};
}

}  // namespace memnet
