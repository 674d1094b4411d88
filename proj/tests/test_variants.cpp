#include "doctest.h"
#include "memnet/bounds.hpp"
#include "memnet/dataset.hpp"
#include "memnet/error.hpp"
#include "memnet/variants.hpp"

using namespace memnet;

namespace {

std::vector<Rational> label_targets(const Dataset& ds) {
  std::vector<Rational> t;
  for (const auto& y : ds.labels) t.emplace_back(y);
  return t;
}

}  // namespace

TEST_CASE("ceil_sqrt and partitions") {
  CHECK(ceil_sqrt(1) == 1);
  CHECK(ceil_sqrt(2) == 2);
  CHECK(ceil_sqrt(16) == 4);
  CHECK(ceil_sqrt(17) == 5);
  const auto parts = partition_sorted(10, 4);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == std::pair<std::size_t, std::size_t>{0, 4});
  CHECK(parts[2] == std::pair<std::size_t, std::size_t>{8, 2});
}

TEST_CASE("bounded depth") {
  const Dataset ds = load_and_validate(random_dataset(64, 2, 4, 12));
  BuildConfig cfg;
  std::size_t prev_width = 0;
  for (std::size_t L : {1u, 2u, 4u, 8u}) {
    const Memorizer m = assemble_bounded_depth(ds, L, cfg);
    CHECK(verify_exact(m.net, ds.points, label_targets(ds)).memorized);
    const std::size_t subsets = (64 + L * L - 1) / (L * L);
    CHECK(m.info.subnets.size() <= subsets);
    CHECK(m.net.metrics().width <= 12 * subsets);
    if (prev_width != 0) CHECK(m.net.metrics().width <= prev_width);
    prev_width = m.net.metrics().width;
  }
  CHECK_THROWS_AS(assemble_bounded_depth(ds, 9, cfg), ParameterError);
  CHECK_THROWS_AS(assemble_bounded_depth(ds, 0, cfg), ParameterError);
}

TEST_CASE("bounded bits") {
  const Dataset ds = load_and_validate(random_dataset(64, 2, 4, 13));
  BuildConfig cfg;
  std::size_t prev_bits = 0;
  for (std::size_t B : {1u, 2u, 4u, 8u}) {
    const Memorizer m = assemble_bounded_bits(ds, B, cfg);
    CHECK(verify_exact(m.net, ds.points, label_targets(ds)).memorized);
    CHECK(m.net.metrics().width <= 14);
    CHECK(m.net.metrics().bits >= prev_bits);
    prev_bits = m.net.metrics().bits;
  }
  CHECK_THROWS_AS(assemble_bounded_bits(ds, 9, cfg), ParameterError);
}
