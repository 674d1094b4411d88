#include "doctest.h"
#include "memnet/bounds.hpp"
#include "memnet/dataset.hpp"
#include "memnet/error.hpp"
#include "memnet/net_json.hpp"
#include "memnet/pipeline.hpp"

using namespace memnet;

namespace {

std::vector<Rational> label_targets(const Dataset& ds) {
  std::vector<Rational> t;
  for (const auto& y : ds.labels) t.emplace_back(y);
  return t;
}

// Copy of `net` with the last layer's first bias shifted by `delta`.
LayeredNet mutate(const LayeredNet& net, long delta) {
  auto layers = net.layers();
  auto& row = layers.back().rows.front();
  row.bias += Dyadic(delta);
  row.bias_f = row.bias.to_double();
  return LayeredNet(net.input_dim(), layers, net.provenance());
}

}  // namespace

TEST_CASE("vc upper bound") {
  CHECK(ceil_log2(BigNat(1)) == 0);
  CHECK(ceil_log2(BigNat(16)) == 4);
  CHECK(ceil_log2(BigNat(17)) == 5);
  CHECK(vc_upper_bits(BigNat(1), BigNat(1)) == 1);
  CHECK(vc_upper_bits(BigNat(16), BigNat(4)) == 128);
}

TEST_CASE("parameter lower bounds") {
  CHECK(lower_bound_params(4, LowerBound::kSqrt) == 2);
  CHECK(lower_bound_params(17, LowerBound::kSqrt) == 5);
  CHECK(lower_bound_params(256, LowerBound::kSqrtLog) == 46);
  CHECK(lower_bound_params(256, LowerBound::kDepth, 4) == 8);
  CHECK_THROWS_AS(lower_bound_params(1, LowerBound::kSqrt), ParameterError);
}

TEST_CASE("audit of a sqrt build") {
  const Dataset ds = load_and_validate(random_dataset(32, 3, 8, 21));
  BuildConfig cfg;
  const Memorizer m = assemble_sqrt(ds, cfg);
  const AuditReport r = audit(m.net, m.info, ds.points, label_targets(ds));
  CHECK(r.pass());
  CHECK(r.verification.memorized);
  CHECK(r.kappa > 0);
  CHECK(r.ratios.count("params") == 1);
  const auto j = to_json(r);
  CHECK(j.at("schema") == kAuditSchema);
  CHECK(j.at("pass") == true);

  const LayeredNet bad = mutate(m.net, 1);
  const Verification v = verify_exact(bad, ds.points, label_targets(ds));
  CHECK_FALSE(v.memorized);
  CHECK(v.mismatches > 0);
  CHECK_FALSE(audit(bad, m.info, ds.points, label_targets(ds)).pass());

  Construction wrong = m.info;
  wrong.theorem = "mystery";
  CHECK_THROWS_AS(audit(m.net, wrong, ds.points, label_targets(ds)), ProvenanceError);

  const Construction back = construction_from_json(to_json(m.info));
  CHECK(to_json(back).dump() == to_json(m.info).dump());
}

TEST_CASE("float evaluation of a small build") {
  const Dataset ds = load_and_validate(random_dataset(8, 1, 2, 4));
  BuildConfig cfg;
  const Memorizer m = assemble_sqrt(ds, cfg);
  const double e = max_error_float(m.net, ds.points, label_targets(ds));
  CHECK((e >= 0 || std::isnan(e)));
}
