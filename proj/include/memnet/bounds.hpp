#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "memnet/dataset.hpp"
#include "memnet/net.hpp"
#include "memnet/pipeline.hpp"

namespace memnet {

inline constexpr const char* kAuditSchema = "memnet.audit";
inline constexpr int kAuditSchemaVersion = 1;

// Slack added to the width-12 claim for the sqrt and regression builds.
inline constexpr std::size_t kWidthSlack = 0;

// ceil(log2 n) for n >= 1.
std::size_t ceil_log2(const BigNat& n);

// W*B + W*ceil(log2 W).
BigNat vc_upper_bits(const BigNat& W, const BigNat& B);

enum class LowerBound {
  kSqrt,     // ceil(sqrt(N))
  kSqrtLog,  // ceil(sqrt(N log2 N))
  kDepth,    // ceil(N / (L log2 N))
};

BigNat lower_bound_params(std::size_t n, LowerBound kind, std::size_t L = 1);

struct Verification {
  bool memorized = false;
  std::size_t mismatches = 0;
  Rational max_error = 0;
  std::size_t first_failure = 0;  // valid when mismatches > 0
};

// Exact check that |net(x_i) - target_i| <= tolerance for every i.
Verification verify_exact(const LayeredNet& net, const std::vector<std::vector<Rational>>& points,
                          const std::vector<Rational>& targets, const Rational& tolerance = 0);

// Float64 evaluation of the same points; returns max |net(x_i) - target_i|.
double max_error_float(const LayeredNet& net, const std::vector<std::vector<Rational>>& points,
                       const std::vector<Rational>& targets);

// Upper checks pass when realized <= bound, lower checks when realized >= bound.
struct Check {
  std::string name;
  double realized = 0;
  double bound = 0;
  bool upper = true;
  bool pass = false;
  bool binding = false;  // binding checks decide AuditReport::pass
};

struct AuditReport {
  std::string theorem;
  std::size_t n = 0;
  std::size_t d = 0;
  BigNat classes = 0;
  NetMetrics realized;
  std::map<std::string, double> ceilings;
  std::map<std::string, double> ratios;
  std::map<std::string, double> lower_bounds;
  std::vector<Check> checks;
  Verification verification;
  std::string vc_upper_bits;
  double kappa = 0;  // N / vc_upper_bits(params, bits)
  std::size_t subnets = 0;

  bool pass() const;
};

// Theorem id comes from info.theorem; unknown ids raise ProvenanceError.
// `targets` are the labels as rationals (the raw targets for regression).
AuditReport audit(const LayeredNet& net, const Construction& info, const std::vector<std::vector<Rational>>& points,
                  const std::vector<Rational>& targets);

nlohmann::json to_json(const AuditReport& r);
Construction construction_from_json(const nlohmann::json& j);

}  // namespace memnet
