#include "memnet/dataset.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <regex>
#include <sstream>

#include "memnet/error.hpp"

namespace memnet {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Rational json_number(const nlohmann::json& v) {
  if (v.is_number_integer()) {
    return v.is_number_unsigned() ? Rational(mpz_class(std::to_string(v.get<std::uint64_t>()), 10))
                                  : Rational(mpz_class(std::to_string(v.get<std::int64_t>()), 10));
  }
  if (v.is_string()) return parse_exact(v.get<std::string>());
  throw SchemaError("numbers must be integers or exact strings, got " + v.dump());
}

void check_shape(const RawData& raw) {
  if (raw.points.empty()) throw DatasetError("dataset has no points");
  if (raw.points.size() != raw.labels.size()) throw DatasetError("point and label counts differ");
  const std::size_t d = raw.points.front().size();
  if (d == 0) throw DatasetError("points must have at least one coordinate");
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    if (raw.points[i].size() != d) {
      throw DatasetError("point " + std::to_string(i) + " has " + std::to_string(raw.points[i].size()) +
                         " coordinates, expected " + std::to_string(d));
    }
  }
}

}  // namespace

Rational parse_exact(const std::string& raw) {
  static const std::regex decimal(R"(([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?)");
  static const std::regex fraction(R"(([+-]?\d+)/(\d+))");
  const std::string text = trim(raw);
  std::smatch m;
  if (std::regex_match(text, m, fraction)) {
    const mpz_class den(m[2].str(), 10);
    if (den == 0) throw SchemaError("zero denominator in '" + text + "'");
    Rational q(mpz_class(m[1].str(), 10), den);
    q.canonicalize();
    return q;
  }
  if (!std::regex_match(text, m, decimal) || (m[2].length() == 0 && m[3].length() == 0)) {
    throw SchemaError("not an exact number: '" + text + "'");
  }
  const std::string digits = m[2].str() + m[3].str();
  long exp10 = -static_cast<long>(m[3].length());
  if (m[4].matched) {
    const std::string e = m[4].str();
    if (e.size() > 6) throw SchemaError("exponent out of range in '" + text + "'");
    exp10 += std::stol(e);
  }
  mpz_class num(digits.empty() ? "0" : digits, 10);
  if (m[1].str() == "-") num = -num;
  mpz_class pow;
  mpz_ui_pow_ui(pow.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational q = exp10 < 0 ? Rational(num, pow) : Rational(num * pow);
  q.canonicalize();
  return q;
}

RawData read_csv(std::istream& in) {
  RawData raw;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (first) {
      first = false;
      try {
        parse_exact(fields.front());
      } catch (const SchemaError&) {
        continue;  // header
      }
    }
    if (fields.size() < 2) throw SchemaError("line " + std::to_string(line_no) + ": need x1..xd,label");
    std::vector<Rational> point;
    point.reserve(fields.size() - 1);
    try {
      for (std::size_t k = 0; k + 1 < fields.size(); ++k) point.push_back(parse_exact(fields[k]));
      raw.labels.push_back(parse_exact(fields.back()));
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
    raw.points.push_back(std::move(point));
  }
  return raw;
}

RawData read_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("points") || !j.contains("labels")) {
    throw SchemaError("dataset JSON needs \"points\" and \"labels\"");
  }
  RawData raw;
  for (const auto& p : j.at("points")) {
    if (!p.is_array()) throw SchemaError("each point must be an array");
    std::vector<Rational> point;
    for (const auto& v : p) point.push_back(json_number(v));
    raw.points.push_back(std::move(point));
  }
  for (const auto& v : j.at("labels")) raw.labels.push_back(json_number(v));
  if (j.contains("classes")) {
    const Rational c = json_number(j.at("classes"));
    if (c.get_den() != 1) throw SchemaError("\"classes\" must be an integer");
    raw.classes = c.get_num();
  }
  return raw;
}

RawData read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path);
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  return json ? read_json(in) : read_csv(in);
}

Geometry measure_geometry(const std::vector<std::vector<Rational>>& points) {
  Geometry g;
  const std::size_t n = points.size();
  Rational diff, sq;
  for (std::size_t i = 0; i < n; ++i) {
    sq = 0;
    for (const auto& c : points[i]) sq += c * c;
    if (i == 0 || sq > g.r_sq) g.r_sq = sq;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sq = 0;
      for (std::size_t k = 0; k < points[i].size(); ++k) {
        diff = points[i][k] - points[j][k];
        sq += diff * diff;
      }
      if (sgn(sq) == 0) {
        throw DuplicatePointError("points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
      if (!g.delta_sq || sq < *g.delta_sq) g.delta_sq = sq;
    }
  }
  return g;
}

Dataset load_and_validate(RawData raw) {
  check_shape(raw);
  Dataset ds;
  ds.labels.reserve(raw.labels.size());
  BigNat max_label = 0;
  for (std::size_t i = 0; i < raw.labels.size(); ++i) {
    const Rational& y = raw.labels[i];
    if (y.get_den() != 1 || y.get_num() < 1) {
      throw LabelRangeError("label " + std::to_string(i) + " is " + to_string(y) + ", labels must be integers >= 1");
    }
    ds.labels.push_back(y.get_num());
    if (y.get_num() > max_label) max_label = y.get_num();
  }
  ds.classes = raw.classes.value_or(max_label);
  if (max_label > ds.classes) {
    throw LabelRangeError("label " + max_label.get_str() + " exceeds the class count " + ds.classes.get_str());
  }
  ds.geometry = measure_geometry(raw.points);
  ds.points = std::move(raw.points);
  return ds;
}

RegressionData load_regression(RawData raw) {
  check_shape(raw);
  RegressionData rd;
  rd.geometry = measure_geometry(raw.points);
  rd.points = std::move(raw.points);
  rd.targets = std::move(raw.labels);
  return rd;
}

RawData random_dataset(std::size_t n, std::size_t d, std::size_t classes, std::uint64_t seed, bool regression) {
  if (n == 0 || d == 0) throw ParameterError("random_dataset: need N >= 1 and d >= 1");
  if (!regression && classes == 0) throw ParameterError("random_dataset: need C >= 1");
  std::mt19937_64 rng(seed);
  // Side 2s+1 with (2s+1)^d >= 4N leaves room for rejection sampling.
  long s = 1;
  while (std::pow(static_cast<double>(2 * s + 1), static_cast<double>(d)) < 4.0 * static_cast<double>(n)) ++s;
  std::uniform_int_distribution<long> coord(-s, s);
  std::set<std::vector<long>> seen;
  RawData raw;
  while (raw.points.size() < n) {
    std::vector<long> p(d);
    for (auto& c : p) c = coord(rng);
    if (!seen.insert(p).second) continue;
    std::vector<Rational> q;
    for (long c : p) q.emplace_back(c);
    raw.points.push_back(std::move(q));
  }
  if (regression) {
    std::uniform_int_distribution<long> k(0, 1000);
    for (std::size_t i = 0; i < n; ++i) {
      Rational y(k(rng), 1000);
      y.canonicalize();
      raw.labels.push_back(y);
    }
  } else {
    std::uniform_int_distribution<std::size_t> label(1, classes);
    for (std::size_t i = 0; i < n; ++i) raw.labels.emplace_back(static_cast<unsigned long>(label(rng)));
    raw.classes = BigNat(static_cast<unsigned long>(classes));
  }
  return raw;
}

void write_csv(std::ostream& out, const RawData& raw) {
  const std::size_t d = raw.points.empty() ? 0 : raw.points.front().size();
  for (std::size_t k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "label\n";
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    for (const auto& c : raw.points[i]) out << to_string(c) << ',';
    out << to_string(raw.labels[i]) << '\n';
  }
}

}  // namespace memnet
