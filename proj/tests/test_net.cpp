#include <random>
#include <vector>

#include "doctest.h"
#include "memnet/error.hpp"
#include "memnet/gadgets.hpp"
#include "memnet/net.hpp"
#include "memnet/net_builder.hpp"
#include "memnet/net_json.hpp"

using namespace memnet;

namespace {

Dyadic dy(long m, std::int64_t e = 0) { return Dyadic(mpz_class(m), e); }

std::vector<Dyadic> run(const LayeredNet& net, std::vector<Dyadic> x) { return eval_exact(net, x); }

// (x0, x1) -> (relu(x0 - x1), x0 + 2 x1 + 1/2)
LayeredNet small_net() {
  NetBuilder nb(2);
  const Affine a = nb.relu(nb.input(0) - nb.input(1));
  const Affine b = nb.relu(nb.input(0) + dy(2) * nb.input(1) + dy(1, -1));
  nb.next_layer();
  std::vector<Affine> out{a, b};
  return nb.finish(out, "small");
}

}  // namespace

TEST_CASE("identity net") {
  const LayeredNet id = identity_net(3);
  CHECK(id.metrics().depth == 1);
  CHECK(id.metrics().params == 3);
  const auto y = run(id, {dy(-3), dy(5, -2), dy(0)});
  CHECK(y[0] == dy(-3));
  CHECK(y[1] == dy(5, -2));
  CHECK(y[2] == dy(0));
}

TEST_CASE("triangle gadget") {
  const LayeredNet t = gadgets::build_triangle();
  CHECK(t.metrics().width == 2);
  CHECK(t.metrics().depth == 2);
  CHECK(run(t, {dy(1, -2)})[0] == dy(1, -1));
  CHECK(run(t, {dy(3, -2)})[0] == dy(1, -1));
  CHECK(run(t, {dy(1, -1)})[0] == dy(1));
  CHECK(run(t, {dy(0)})[0] == dy(0));
  CHECK(run(t, {dy(1)})[0] == dy(0));
  for (long k = 0; k <= 64; ++k) {
    CHECK(run(t, {dy(k, -6)})[0] == gadgets::triangle(dy(k, -6)));
  }
}

TEST_CASE("metrics count parameters and bits") {
  const LayeredNet n = small_net();
  CHECK(n.metrics().width == 2);
  CHECK(n.metrics().depth == 2);
  // layer 1: 2 + 2 weights, 1 bias; layer 2: 2 weights.
  CHECK(n.metrics().params == 7);
  CHECK(n.metrics().bits == 1);
  CHECK(n.metrics().exponent_range == 1);
}

TEST_CASE("serial composition") {
  const LayeredNet a = small_net();
  const LayeredNet t = gadgets::build_triangle();
  NetBuilder nb(2);
  std::vector<Affine> sum{nb.input(0) + nb.input(1)};
  const LayeredNet add = nb.finish(sum, "add");
  const LayeredNet pass = compose_serial(a, add, Junction::kReluPassThrough);
  const LayeredNet fused = compose_serial(a, add, Junction::kAffineFusion);
  CHECK(pass.metrics().depth == a.metrics().depth + add.metrics().depth);
  CHECK(fused.metrics().depth == a.metrics().depth + add.metrics().depth - 1);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Dyadic x0 = dy(static_cast<long>(rng() % 64), -3);
    const Dyadic x1 = dy(static_cast<long>(rng() % 64), -4);
    const auto mid = run(a, {x0, x1});
    const Dyadic expect = mid[0] + mid[1];
    CHECK(run(pass, {x0, x1})[0] == expect);
    CHECK(run(fused, {x0, x1})[0] == expect);
  }
  const std::vector<LayeredNet> chain{t, t, t};
  const LayeredNet t3 = compose_chain(chain, Junction::kReluPassThrough, "t3");
  CHECK(t3.metrics().depth == 6);
  for (long k = 0; k <= 32; ++k) {
    CHECK(run(t3, {dy(k, -5)})[0] == gadgets::triangle_iter(dy(k, -5), 3));
  }
}

TEST_CASE("parallel stacking and identity extension") {
  const LayeredNet a = small_net();
  const LayeredNet t = compose_serial(gadgets::build_triangle(), gadgets::build_triangle());
  NetBuilder nb(2);
  std::vector<Affine> first{nb.input(0)};
  const LayeredNet pick = nb.finish(first, "pick");
  const LayeredNet t2 = compose_serial(pick, t, Junction::kAffineFusion);
  const std::vector<LayeredNet> members{a, t2};
  const LayeredNet s = stack_parallel(members);
  CHECK(s.output_dim() == 3);
  CHECK(s.metrics().depth == std::max(a.metrics().depth, t2.metrics().depth));
  const auto y = run(s, {dy(3, -3), dy(1, -3)});
  const auto ya = run(a, {dy(3, -3), dy(1, -3)});
  CHECK(y[0] == ya[0]);
  CHECK(y[1] == ya[1]);
  CHECK(y[2] == gadgets::triangle_iter(dy(3, -3), 2));

  const LayeredNet e = extend_identity(a, 2, Side::kPrepend);
  CHECK(e.input_dim() == 4);
  CHECK(e.output_dim() == 4);
  CHECK(e.metrics().width == 4);
  // One weight per carried channel per layer.
  CHECK(e.metrics().params == a.metrics().params + 2 * a.metrics().depth);
  const auto ye = run(e, {dy(7), dy(1, -1), dy(3, -3), dy(1, -3)});
  CHECK(ye[0] == dy(7));
  CHECK(ye[1] == dy(1, -1));
  CHECK(ye[2] == ya[0]);
  CHECK(ye[3] == ya[1]);
  CHECK_THROWS_AS(run(e, {dy(-1), dy(0), dy(0), dy(0)}), ContractViolation);
  EvalOptions lax;
  lax.check_contracts = false;
  std::vector<Dyadic> neg{dy(-1), dy(0), dy(0), dy(0)};
  CHECK(eval_exact(e, neg, lax)[0] == dy(0));
}

TEST_CASE("rational inputs") {
  const LayeredNet a = small_net();
  std::vector<Rational> x{Rational(1, 3), Rational(1, 5)};
  const auto y = eval_rational(a, x);
  CHECK(y[0] == Rational(2, 15));
  CHECK(y[1] == Rational(1, 3) + Rational(2, 5) + Rational(1, 2));
  std::vector<double> xf{1.0 / 3.0, 0.2};
  CHECK(eval_float(a, xf)[1] == doctest::Approx(y[1].get_d()));
}

TEST_CASE("json round trip") {
  const std::vector<LayeredNet> nets{small_net(), gadgets::build_indicator(BigNat(2), BigNat(5)),
                                     extend_identity(gadgets::build_triangle(), 3, Side::kAppend)};
  for (const auto& n : nets) {
    const auto j = net_to_json(n);
    const LayeredNet back = net_from_json(j);
    CHECK(back.metrics() == n.metrics());
    CHECK(net_to_json(back).dump() == j.dump());
    CHECK(back.provenance() == n.provenance());
  }
  auto j = net_to_json(small_net());
  j["schema"] = "other";
  CHECK_THROWS_AS(net_from_json(j), SchemaError);
}

TEST_CASE("shape validation") {
  AffineLayer l;
  l.in_dim = 2;
  l.rows.resize(1);
  l.rows[0].entries.push_back({5, dy(1), 1.0});
  CHECK_THROWS(LayeredNet(2, {l}, "bad"));
  CHECK_THROWS(LayeredNet(2, {}, "empty"));
}
