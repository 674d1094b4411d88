#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <optional>
#include <string>
#include <vector>

#include "memnet/dyadic.hpp"

namespace memnet {

// Points and labels as read from disk, before validation. Labels stay
// rational so the same reader serves classification and regression.
struct RawData {
  std::vector<std::vector<Rational>> points;
  std::vector<Rational> labels;
  std::optional<BigNat> classes;  // declared class count, JSON only
};

// Parses "12", "-3.25", "1e-3", "7/8". Throws SchemaError on anything else.
Rational parse_exact(const std::string& text);

// CSV: one row per point, columns x1..xd,label. A header row is skipped when
// its first field does not parse as a number.
RawData read_csv(std::istream& in);
// JSON: {"points": [[...], ...], "labels": [...], "classes": C?}; numbers are
// integers or strings accepted by parse_exact.
RawData read_json(std::istream& in);
// Dispatches on the file extension (.json, else CSV).
RawData read_data_file(const std::string& path);

struct Geometry {
  std::optional<Rational> delta_sq;  // min pairwise squared distance; none when N = 1
  Rational r_sq;                     // max squared norm
};

// Exhaustive O(N^2 d) sweep. Throws DuplicatePointError on coincident points.
Geometry measure_geometry(const std::vector<std::vector<Rational>>& points);

struct Dataset {
  std::vector<std::vector<Rational>> points;
  std::vector<BigNat> labels;  // each in [1, classes]
  BigNat classes;
  Geometry geometry;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.front().size(); }
};

// Classification view. Labels must be integers in [1, C]; C defaults to the
// largest label.
Dataset load_and_validate(RawData raw);

struct RegressionData {
  std::vector<std::vector<Rational>> points;
  std::vector<Rational> targets;
  Geometry geometry;
};

RegressionData load_regression(RawData raw);

// Seeded synthetic data: N distinct integer points in a cube around the
// origin, labels uniform in [1, C], or uniform k/1000 in [0, 1] when
// `regression` is set.
RawData random_dataset(std::size_t n, std::size_t d, std::size_t classes, std::uint64_t seed,
                       bool regression = false);

void write_csv(std::ostream& out, const RawData& raw);

}  // namespace memnet
