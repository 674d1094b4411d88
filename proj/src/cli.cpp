#include "memnet/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "memnet/driver.hpp"
#include "memnet/error.hpp"
#include "memnet/net_json.hpp"
#include "memnet/oracle.hpp"
#include "memnet/variants.hpp"

namespace memnet {
namespace {

struct Options {
  std::string mode = "sqrt";
  std::size_t L = 0;
  std::size_t B = 0;
  std::string epsilon;
  std::uint64_t seed = 0;
  std::string in;
  std::string out;
  std::string report;
  std::string net;
  std::string precision = "exact";
  std::size_t n_max = 10;
  std::string suite;
  int fault_shift = 0;
  std::vector<std::size_t> n_list;
  std::vector<std::size_t> l_list;
  std::vector<std::size_t> b_list;
  std::vector<std::string> eps_list;
  std::size_t dim = 2;
  std::size_t classes = 4;
};

std::vector<std::vector<Rational>> read_points(const std::string& path, std::size_t dim) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    const nlohmann::json j = read_json_file(path);
    std::vector<std::vector<Rational>> pts;
    if (!j.contains("points")) throw SchemaError("points file needs \"points\"");
    for (const auto& p : j.at("points")) {
      std::vector<Rational> v;
      for (const auto& c : p) v.push_back(c.is_string() ? parse_exact(c.get<std::string>()) : Rational(c.get<long>()));
      pts.push_back(std::move(v));
    }
    return pts;
  }
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path);
  std::vector<std::vector<Rational>> pts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (first) {
      first = false;
      try {
        parse_exact(fields.front());
      } catch (const SchemaError&) {
        continue;
      }
    }
    if (fields.size() != dim && fields.size() != dim + 1) {
      throw SchemaError("expected " + std::to_string(dim) + " coordinates per row");
    }
    std::vector<Rational> v;
    for (std::size_t k = 0; k < dim; ++k) v.push_back(parse_exact(fields[k]));
    pts.push_back(std::move(v));
  }
  return pts;
}

struct LoadedNet {
  LayeredNet net;
  Construction info;
};

LoadedNet load_net(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  LayeredNet net = net_from_json(j);
  if (!j.contains("construction")) throw ProvenanceError(path + " carries no construction record");
  return {std::move(net), construction_from_json(j.at("construction"))};
}

int cmd_build(const Options& o, std::ostream& out, std::ostream& err) {
  BuildRequest req;
  req.mode = parse_mode(o.mode);
  req.L = o.L;
  req.B = o.B;
  if (!o.epsilon.empty()) req.epsilon = parse_epsilon(o.epsilon);
  req.config.seed = o.seed;
  req.config.retry_budget = default_retry_budget();
  const RawData raw = read_data_file(o.in);
  const BuildResult r = build_and_audit(raw, req);
  if (!o.out.empty()) write_json_file(o.out, r.net_json);
  if (!o.report.empty()) write_json_file(o.report, r.report_json);
  out << nlohmann::json{{"command", "build"},
                        {"mode", o.mode},
                        {"memorized", r.report.verification.memorized},
                        {"pass", r.report.pass()},
                        {"metrics", r.net_json.at("metrics")}}
             .dump()
      << '\n';
  if (!r.report.pass()) {
    for (const auto& c : r.report.checks) {
      if (c.binding && !c.pass) err << "audit check failed: " << c.name << " realized " << c.realized << " bound "
                                    << c.bound << '\n';
    }
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const LoadedNet ln = load_net(o.net);
  const RawData raw = read_data_file(o.in);
  const Targets t = targets_for(raw, ln.info.theorem);
  if (t.points.empty() || t.points.front().size() != ln.net.input_dim()) {
    throw SchemaError("data dimension does not match the network input");
  }
  if (o.precision == "float64") {
    const double e = max_error_float(ln.net, t.points, t.values);
    out << nlohmann::json{{"command", "verify"}, {"precision", "float64"}, {"points", t.points.size()},
                          {"max_error", e}}
               .dump()
        << '\n';
    return kExitOk;
  }
  Rational tol = 0;
  if (ln.info.theorem == "regression" && ln.info.epsilon) tol = ln.info.epsilon->to_rational() / 2;
  const Verification v = verify_exact(ln.net, t.points, t.values, tol);
  out << nlohmann::json{{"command", "verify"},     {"precision", "exact"},   {"points", t.points.size()},
                        {"memorized", v.memorized}, {"mismatches", v.mismatches}, {"max_error", to_string(v.max_error)}}
             .dump()
      << '\n';
  if (!v.memorized) {
    err << "memorization failed on " << v.mismatches << " point(s), first at index " << v.first_failure << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream&) {
  const LayeredNet net = net_from_json(read_json_file(o.net));
  const auto pts = read_points(o.in, net.input_dim());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    nlohmann::json line{{"index", i}};
    if (o.precision == "float64") {
      std::vector<double> x;
      for (const auto& q : pts[i]) x.push_back(q.get_d());
      line["output"] = eval_float(net, x).front();
    } else {
      line["output"] = to_string(eval_rational(net, pts[i]).front());
    }
    out << line.dump() << '\n';
  }
  return kExitOk;
}

int cmd_audit(const Options& o, std::ostream& out, std::ostream&) {
  const LoadedNet ln = load_net(o.net);
  const RawData raw = read_data_file(o.in);
  const Targets t = targets_for(raw, ln.info.theorem);
  const AuditReport r = audit(ln.net, ln.info, t.points, t.values);
  const nlohmann::json j = to_json(r);
  if (!o.report.empty()) write_json_file(o.report, j);
  out << nlohmann::json{{"command", "audit"}, {"theorem", r.theorem}, {"pass", r.pass()},
                        {"memorized", r.verification.memorized}}
             .dump()
      << '\n';
  return r.pass() ? kExitOk : kExitFailure;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> suites{o.suite};
  if (o.suite == "all") suites = {"triangle", "indicator", "distance", "bits", "stage3"};
  int code = kExitOk;
  for (const auto& s : suites) {
    const OracleResult r = run_oracle(s, o.n_max, o.fault_shift);
    out << to_json(r).dump() << '\n';
    if (!r.pass()) {
      err << "oracle " << s << ": " << r.mismatches << " mismatch(es); witness " << r.witness.dump() << '\n';
      code = kExitFailure;
    }
  }
  return code;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n_list.empty()) throw ParameterError("sweep needs --n-list");
  const Mode mode = parse_mode(o.mode);
  std::ostringstream csv;
  csv << "N,mode,param,seed,width,depth,params,bits,exponent_range,memorized,pass,"
         "ceiling_depth,ratio_depth,ceiling_params,ratio_params,ceiling_bits,ratio_bits,"
         "lb_sqrt,lb_sqrt_log,kappa\n";
  int code = kExitOk;
  for (const std::size_t n : o.n_list) {
    std::vector<std::string> params;
    if (mode == Mode::kSqrt) params = {""};
    if (mode == Mode::kDepth) {
      if (o.l_list.empty()) throw ParameterError("--mode depth sweep needs --L-list");
      for (auto v : o.l_list) params.push_back(std::to_string(v));
    }
    if (mode == Mode::kBits) {
      if (o.b_list.empty()) throw ParameterError("--mode bits sweep needs --B-list");
      for (auto v : o.b_list) params.push_back(std::to_string(v));
    }
    if (mode == Mode::kRegression) {
      if (o.eps_list.empty()) throw ParameterError("--mode regression sweep needs --eps-list");
      params = o.eps_list;
    }
    const RawData raw = random_dataset(n, o.dim, o.classes, o.seed, mode == Mode::kRegression);
    for (const auto& p : params) {
      BuildRequest req;
      req.mode = mode;
      req.config.seed = o.seed;
      req.config.retry_budget = default_retry_budget();
      if (mode == Mode::kDepth) req.L = std::stoul(p);
      if (mode == Mode::kBits) req.B = std::stoul(p);
      if (mode == Mode::kRegression) req.epsilon = parse_epsilon(p);
      if ((req.L && req.L > ceil_sqrt(n)) || (req.B && req.B > ceil_sqrt(n))) {
        err << "skipping N=" << n << " param " << p << ": above ceil(sqrt(N))\n";
        continue;
      }
      const BuildResult r = build_and_audit(raw, req);
      const auto& m = r.report.realized;
      auto get = [](const std::map<std::string, double>& mp, const char* k) {
        const auto it = mp.find(k);
        return it == mp.end() ? std::string() : nlohmann::json(it->second).dump();
      };
      csv << n << ',' << o.mode << ',' << p << ',' << o.seed << ',' << m.width << ',' << m.depth << ','
          << m.params << ',' << m.bits << ',' << m.exponent_range << ',' << r.report.verification.memorized << ','
          << r.report.pass() << ',' << get(r.report.ceilings, "depth") << ',' << get(r.report.ratios, "depth")
          << ',' << get(r.report.ceilings, "params") << ',' << get(r.report.ratios, "params") << ','
          << get(r.report.ceilings, "bits") << ',' << get(r.report.ratios, "bits") << ','
          << get(r.report.lower_bounds, "sqrt") << ',' << get(r.report.lower_bounds, "sqrt_log") << ','
          << nlohmann::json(r.report.kappa).dump() << '\n';
      if (!r.report.pass()) code = kExitFailure;
    }
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw Error("cannot write " + o.out);
    f << csv.str();
    out << nlohmann::json{{"command", "sweep"}, {"out", o.out}}.dump() << '\n';
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"memnet: compile a labeled, separated dataset into an exact ReLU memorizer"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> modes{"sqrt", "depth", "bits", "regression"};
  const std::vector<std::string> precisions{"exact", "float64"};

  auto* build = app.add_subcommand("build", "Build a network, verify it exactly and audit it");
  build->add_option("--mode", o.mode, "Construction")->check(CLI::IsMember(modes));
  build->add_option("--L", o.L, "Depth parameter for --mode depth");
  build->add_option("--B", o.B, "Bit parameter for --mode bits");
  build->add_option("--epsilon", o.epsilon, "Label cell width for --mode regression (dyadic)");
  build->add_option("--seed", o.seed, "Projection search seed");
  build->add_option("--in", o.in, "Dataset (.csv or .json)")->required();
  build->add_option("--out", o.out, "Network JSON output");
  build->add_option("--report", o.report, "Audit report JSON output");

  auto* verify = app.add_subcommand("verify", "Check a network against a dataset");
  verify->add_option("--net", o.net, "Network JSON")->required();
  verify->add_option("--in", o.in, "Dataset")->required();
  verify->add_option("--precision", o.precision)->check(CLI::IsMember(precisions));

  auto* eval = app.add_subcommand("eval", "Evaluate a network on points");
  eval->add_option("--net", o.net, "Network JSON")->required();
  eval->add_option("--in", o.in, "Points (.csv or .json)")->required();
  eval->add_option("--precision", o.precision)->check(CLI::IsMember(precisions));

  auto* aud = app.add_subcommand("audit", "Re-audit a built network");
  aud->add_option("--net", o.net, "Network JSON")->required();
  aud->add_option("--in", o.in, "Dataset")->required();
  aud->add_option("--report", o.report, "Audit report JSON output");

  auto* oracle = app.add_subcommand("oracle", "Run exhaustive gadget oracles");
  oracle->add_option("suite", o.suite, "triangle|indicator|distance|bits|stage3|all")
      ->required()
      ->check(CLI::IsMember({"triangle", "indicator", "distance", "bits", "stage3", "all"}));
  oracle->add_option("--n-max", o.n_max, "Largest bit width")->check(CLI::Range(std::size_t{1}, kOracleMaxN));
  oracle->add_option("--fault-shift", o.fault_shift)->group("");

  auto* sweep = app.add_subcommand("sweep", "Build over parameter ranges and emit CSV");
  sweep->add_option("--mode", o.mode)->check(CLI::IsMember(modes));
  sweep->add_option("--n-list", o.n_list)->delimiter(',')->required();
  sweep->add_option("--L-list", o.l_list)->delimiter(',');
  sweep->add_option("--B-list", o.b_list)->delimiter(',');
  sweep->add_option("--eps-list", o.eps_list)->delimiter(',');
  sweep->add_option("--seed", o.seed);
  sweep->add_option("--d", o.dim, "Dimension of the generated data");
  sweep->add_option("--classes", o.classes, "Class count of the generated data");
  sweep->add_option("--out", o.out, "CSV output (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (build->parsed()) return cmd_build(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (aud->parsed()) return cmd_audit(o, out, err);
    if (oracle->parsed()) return cmd_oracle(o, out, err);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
  } catch (const ProjectionSearchExhausted& e) {
    err << "ProjectionSearchExhausted: " << e.what() << '\n';
    return kExitProjection;
  } catch (const DuplicatePointError& e) {
    err << "DuplicatePointError: " << e.what() << '\n';
    return kExitInput;
  } catch (const LabelRangeError& e) {
    err << "LabelRangeError: " << e.what() << '\n';
    return kExitInput;
  } catch (const DatasetError& e) {
    err << "DatasetError: " << e.what() << '\n';
    return kExitInput;
  } catch (const SchemaError& e) {
    err << "SchemaError: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParameterError& e) {
    err << "ParameterError: " << e.what() << '\n';
    return kExitInput;
  } catch (const ProvenanceError& e) {
    err << "ProvenanceError: " << e.what() << '\n';
    return kExitInput;
  } catch (const DimensionError& e) {
    err << "DimensionError: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitInput;
}

}  // namespace memnet
