#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "memnet/bounds.hpp"
#include "memnet/dataset.hpp"
#include "memnet/pipeline.hpp"

namespace memnet {

enum class Mode { kSqrt, kDepth, kBits, kRegression };

Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

struct BuildRequest {
  Mode mode = Mode::kSqrt;
  std::size_t L = 0;
  std::size_t B = 0;
  std::optional<Dyadic> epsilon;
  BuildConfig config;
};

struct BuildResult {
  Memorizer memorizer;
  AuditReport report;
  nlohmann::json net_json;
  nlohmann::json report_json;
};

// Parses an exact epsilon; ParameterError unless it is a positive dyadic.
Dyadic parse_epsilon(const std::string& text);

// Validates the data for the requested mode, builds, and audits.
BuildResult build_and_audit(const RawData& raw, const BuildRequest& req);

// Points and targets of a raw file as the audit consumes them: labels for
// classification, raw values for regression.
struct Targets {
  std::vector<std::vector<Rational>> points;
  std::vector<Rational> values;
};
Targets targets_for(const RawData& raw, const std::string& theorem);

}  // namespace memnet
