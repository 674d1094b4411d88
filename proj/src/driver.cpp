#include "memnet/driver.hpp"

#include "memnet/error.hpp"
#include "memnet/net_json.hpp"
#include "memnet/variants.hpp"

namespace memnet {

Mode parse_mode(const std::string& s) {
  if (s == "sqrt") return Mode::kSqrt;
  if (s == "depth") return Mode::kDepth;
  if (s == "bits") return Mode::kBits;
  if (s == "regression") return Mode::kRegression;
  throw ParameterError("unknown mode '" + s + "'");
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kSqrt:
      return "sqrt";
    case Mode::kDepth:
      return "depth";
    case Mode::kBits:
      return "bits";
    case Mode::kRegression:
      return "regression";
  }
  return "?";
}

Dyadic parse_epsilon(const std::string& text) {
  Rational q;
  try {
    q = parse_exact(text);
  } catch (const SchemaError& e) {
    throw ParameterError(std::string("epsilon: ") + e.what());
  }
  if (sgn(q) <= 0) throw ParameterError("epsilon must be positive");
  auto d = Dyadic::from_rational(q);
  if (!d) throw ParameterError("epsilon must be a dyadic rational (denominator a power of two)");
  return *d;
}

Targets targets_for(const RawData& raw, const std::string& theorem) {
  Targets t{raw.points, raw.labels};
  if (theorem != "regression") {
    for (const auto& y : raw.labels) {
      if (y.get_den() != 1 || y.get_num() < 1) throw LabelRangeError("labels must be integers >= 1");
    }
  }
  return t;
}

BuildResult build_and_audit(const RawData& raw, const BuildRequest& req) {
  Memorizer m = [&]() -> Memorizer {
    switch (req.mode) {
      case Mode::kSqrt:
        return assemble_sqrt(load_and_validate(raw), req.config);
      case Mode::kDepth:
        if (req.L == 0) throw ParameterError("--mode depth needs --L");
        return assemble_bounded_depth(load_and_validate(raw), req.L, req.config);
      case Mode::kBits:
        if (req.B == 0) throw ParameterError("--mode bits needs --B");
        return assemble_bounded_bits(load_and_validate(raw), req.B, req.config);
      case Mode::kRegression:
        if (!req.epsilon) throw ParameterError("--mode regression needs --epsilon");
        return regression_wrap(load_regression(raw), *req.epsilon, req.config);
    }
    throw ParameterError("unknown mode");
  }();
  const Targets t = targets_for(raw, m.info.theorem);
  AuditReport report = audit(m.net, m.info, t.points, t.values);
  nlohmann::json net_json = net_to_json(m.net, to_json(m.info));
  nlohmann::json report_json = to_json(report);
  return {std::move(m), std::move(report), std::move(net_json), std::move(report_json)};
}

}  // namespace memnet
