#include <set>
#include <sstream>

#include "doctest.h"
#include "memnet/dataset.hpp"
#include "memnet/error.hpp"

using namespace memnet;

namespace {

RawData raw(std::vector<std::vector<long>> pts, std::vector<long> labels) {
  RawData r;
  for (const auto& p : pts) {
    std::vector<Rational> q;
    for (long v : p) q.emplace_back(v);
    r.points.push_back(q);
  }
  for (long y : labels) r.labels.emplace_back(y);
  return r;
}

}  // namespace

TEST_CASE("exact number parsing") {
  CHECK(parse_exact("12") == 12);
  CHECK(parse_exact("-3.25") == Rational(-13, 4));
  CHECK(parse_exact("0.25") == Rational(1, 4));
  CHECK(parse_exact("0.0625") == Rational(1, 16));
  CHECK(parse_exact("1e-3") == Rational(1, 1000));
  CHECK(parse_exact("2.5E2") == 250);
  CHECK(parse_exact("7/8") == Rational(7, 8));
  CHECK(parse_exact("010") == 10);
  CHECK(parse_exact("3/09") == Rational(1, 3));
  CHECK_THROWS_AS(parse_exact("abc"), SchemaError);
  CHECK_THROWS_AS(parse_exact("1/0"), SchemaError);
  CHECK_THROWS_AS(parse_exact(""), SchemaError);
}

TEST_CASE("geometry") {
  const Geometry g = measure_geometry(raw({{0}, {3}}, {1, 2}).points);
  CHECK(*g.delta_sq == 9);
  CHECK(g.r_sq == 9);
  const Geometry sq = measure_geometry(raw({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {1, 1, 1, 1}).points);
  CHECK(*sq.delta_sq == 1);
  CHECK(sq.r_sq == 2);
  const Geometry one = measure_geometry(raw({{4, 3}}, {1}).points);
  CHECK_FALSE(one.delta_sq.has_value());
  CHECK(one.r_sq == 25);
  CHECK_THROWS_AS(measure_geometry(raw({{1, 2}, {3, 4}, {1, 2}}, {1, 1, 1}).points), DuplicatePointError);
}

TEST_CASE("classification validation") {
  const Dataset ds = load_and_validate(raw({{0}, {3}, {5}}, {1, 3, 2}));
  CHECK(ds.classes == 3);
  CHECK(ds.size() == 3);
  CHECK(ds.dim() == 1);
  CHECK_THROWS_AS(load_and_validate(raw({{0}, {1}}, {0, 1})), LabelRangeError);
  RawData frac = raw({{0}, {1}}, {1, 1});
  frac.labels[0] = Rational(1, 2);
  CHECK_THROWS_AS(load_and_validate(frac), LabelRangeError);
  RawData declared = raw({{0}, {1}}, {1, 4});
  declared.classes = BigNat(3);
  CHECK_THROWS_AS(load_and_validate(declared), LabelRangeError);
  CHECK_THROWS_AS(load_and_validate(raw({{0}, {1, 2}}, {1, 1})), DatasetError);
  CHECK_THROWS_AS(load_and_validate(raw({}, {})), DatasetError);
}

TEST_CASE("csv and json readers") {
  std::istringstream csv("x1,x2,label\n0.5,1,2\n-1/3,2e1,1\n");
  const RawData r = read_csv(csv);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0][0] == Rational(1, 2));
  CHECK(r.points[1][0] == Rational(-1, 3));
  CHECK(r.points[1][1] == 20);
  CHECK(r.labels[0] == 2);
  std::istringstream js(R"({"points": [[1, "0.25"], [2, 3]], "labels": [1, 2], "classes": 4})");
  const RawData j = read_json(js);
  CHECK(j.points[0][1] == Rational(1, 4));
  CHECK(*j.classes == 4);
  std::istringstream bad(R"({"points": [[1]]})");
  CHECK_THROWS_AS(read_json(bad), SchemaError);
}

TEST_CASE("random datasets are seeded and distinct") {
  const RawData a = random_dataset(64, 3, 16, 5);
  const RawData b = random_dataset(64, 3, 16, 5);
  const RawData c = random_dataset(64, 3, 16, 6);
  CHECK(a.points == b.points);
  CHECK(a.labels == b.labels);
  CHECK(a.points != c.points);
  CHECK_NOTHROW(measure_geometry(a.points));
  for (const auto& y : a.labels) CHECK((y >= 1 && y <= 16));
  const RawData r = random_dataset(32, 2, 0, 1, true);
  for (const auto& y : r.labels) CHECK((y >= 0 && y <= 1));
  std::ostringstream out;
  write_csv(out, a);
  std::istringstream in(out.str());
  const RawData back = read_csv(in);
  CHECK(back.points == a.points);
  CHECK(back.labels == a.labels);
}
