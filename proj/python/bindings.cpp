#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "memnet/bounds.hpp"
#include "memnet/cli.hpp"
#include "memnet/dataset.hpp"
#include "memnet/driver.hpp"
#include "memnet/error.hpp"
#include "memnet/net_json.hpp"
#include "memnet/oracle.hpp"

namespace py = pybind11;
using namespace memnet;

namespace {

using Table = std::vector<std::vector<std::string>>;

RawData to_raw(const Table& points, const std::vector<std::string>& labels) {
  RawData raw;
  for (const auto& row : points) {
    std::vector<Rational> p;
    for (const auto& v : row) p.push_back(parse_exact(v));
    raw.points.push_back(std::move(p));
  }
  for (const auto& y : labels) raw.labels.push_back(parse_exact(y));
  return raw;
}

py::object loads(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict build(const Table& points, const std::vector<std::string>& labels, const std::string& mode, std::size_t L,
               std::size_t B, std::optional<std::string> epsilon, std::uint64_t seed) {
  BuildRequest req;
  req.mode = parse_mode(mode);
  req.L = L;
  req.B = B;
  if (epsilon) req.epsilon = parse_epsilon(*epsilon);
  req.config.seed = seed;
  req.config.retry_budget = default_retry_budget();
  const BuildResult r = build_and_audit(to_raw(points, labels), req);
  py::dict out;
  out["net"] = r.net_json.dump();
  out["report"] = loads(r.report_json);
  out["pass"] = r.report.pass();
  return out;
}

std::vector<std::string> evaluate(const std::string& net_json, const Table& points) {
  const LayeredNet net = net_from_json(nlohmann::json::parse(net_json));
  std::vector<std::string> out;
  for (const auto& p : to_raw(points, {}).points) out.push_back(to_string(eval_rational(net, p).front()));
  return out;
}

py::dict verify(const std::string& net_json, const Table& points, const std::vector<std::string>& targets,
                const std::string& tolerance) {
  const LayeredNet net = net_from_json(nlohmann::json::parse(net_json));
  const RawData raw = to_raw(points, targets);
  const Verification v = verify_exact(net, raw.points, raw.labels, parse_exact(tolerance));
  py::dict out;
  out["memorized"] = v.memorized;
  out["mismatches"] = v.mismatches;
  out["max_error"] = to_string(v.max_error);
  return out;
}

py::dict metrics(const std::string& net_json) {
  return loads(metrics_to_json(net_from_json(nlohmann::json::parse(net_json)).metrics()));
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact memorizing ReLU network compiler";
  py::register_exception<Error>(m, "MemnetError", PyExc_ValueError);
  m.def("build", &build, py::arg("points"), py::arg("labels"), py::arg("mode") = "sqrt", py::arg("L") = 0,
        py::arg("B") = 0, py::arg("epsilon") = py::none(), py::arg("seed") = 0);
  m.def("evaluate", &evaluate, py::arg("net"), py::arg("points"));
  m.def("verify", &verify, py::arg("net"), py::arg("points"), py::arg("targets"), py::arg("tolerance") = "0");
  m.def("metrics", &metrics, py::arg("net"));
  m.def("oracle", [](const std::string& suite, std::size_t n_max) { return loads(to_json(run_oracle(suite, n_max))); },
        py::arg("suite"), py::arg("n_max") = 6);
  m.def("cli", &cli, py::arg("args"));
}
