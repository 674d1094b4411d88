#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "memnet/cli.hpp"
#include "memnet/dataset.hpp"

using namespace memnet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("memnet_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_data(const fs::path& dir, const std::string& name, const RawData& raw) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  write_csv(out, raw);
  return p;
}

}  // namespace

TEST_CASE("build, verify, eval and audit") {
  const fs::path dir = scratch("roundtrip");
  const fs::path data = write_data(dir, "d.csv", random_dataset(24, 2, 6, 3));
  const std::string net = (dir / "net.json").string();
  const std::string rep = (dir / "report.json").string();
  Run b = cli({"build", "--mode", "sqrt", "--seed", "5", "--in", data.string(), "--out", net, "--report", rep});
  REQUIRE(b.code == kExitOk);
  const auto line = nlohmann::json::parse(b.out);
  CHECK(line.at("pass") == true);
  const auto report = nlohmann::json::parse(slurp(rep));
  CHECK(report.at("memorized") == true);

  CHECK(cli({"verify", "--net", net, "--in", data.string()}).code == kExitOk);
  const Run vf = cli({"verify", "--net", net, "--in", data.string(), "--precision", "float64"});
  CHECK(vf.code == kExitOk);
  CHECK(nlohmann::json::parse(vf.out).contains("max_error"));
  const Run ev = cli({"eval", "--net", net, "--in", data.string()});
  CHECK(ev.code == kExitOk);
  CHECK(std::count(ev.out.begin(), ev.out.end(), '\n') == 24);
  CHECK(cli({"audit", "--net", net, "--in", data.string()}).code == kExitOk);

  // Same inputs give byte-identical files.
  const std::string net2 = (dir / "net2.json").string();
  const std::string rep2 = (dir / "report2.json").string();
  REQUIRE(cli({"build", "--mode", "sqrt", "--seed", "5", "--in", data.string(), "--out", net2, "--report", rep2})
              .code == kExitOk);
  CHECK(slurp(net) == slurp(net2));
  CHECK(slurp(rep) == slurp(rep2));

  // A network checked against other labels fails.
  RawData other = random_dataset(24, 2, 6, 3);
  other.labels[0] = other.labels[0] == 1 ? Rational(2) : Rational(1);
  const fs::path wrong = write_data(dir, "wrong.csv", other);
  CHECK(cli({"verify", "--net", net, "--in", wrong.string()}).code == kExitFailure);
  CHECK(cli({"audit", "--net", net, "--in", wrong.string()}).code == kExitFailure);
}

TEST_CASE("variant modes") {
  const fs::path dir = scratch("variants");
  const fs::path data = write_data(dir, "d.csv", random_dataset(16, 1, 3, 8));
  const std::string net = (dir / "net.json").string();
  CHECK(cli({"build", "--mode", "depth", "--L", "2", "--in", data.string(), "--out", net}).code == kExitOk);
  CHECK(cli({"build", "--mode", "bits", "--B", "2", "--in", data.string(), "--out", net}).code == kExitOk);
  const fs::path reg = write_data(dir, "r.csv", random_dataset(16, 1, 0, 8, true));
  CHECK(cli({"build", "--mode", "regression", "--epsilon", "0.25", "--in", reg.string(), "--out", net}).code ==
        kExitOk);
  CHECK(cli({"build", "--mode", "regression", "--epsilon", "1/16", "--in", reg.string(), "--out", net}).code ==
        kExitOk);
}

TEST_CASE("input errors exit 2") {
  const fs::path dir = scratch("errors");
  const fs::path data = write_data(dir, "d.csv", random_dataset(16, 1, 3, 8));
  CHECK(cli({"build", "--in", (dir / "missing.csv").string()}).code == kExitInput);
  CHECK(cli({"build", "--mode", "depth", "--L", "5", "--in", data.string()}).code == kExitInput);
  CHECK(cli({"build", "--mode", "depth", "--in", data.string()}).code == kExitInput);
  CHECK(cli({"build", "--mode", "regression", "--epsilon", "0.1", "--in", data.string()}).code == kExitInput);
  CHECK(cli({"build", "--mode", "wavelet", "--in", data.string()}).code == kExitInput);
  CHECK(cli({"oracle", "triangle", "--n-max", "99"}).code == kExitInput);
  CHECK(cli({"frobnicate"}).code == kExitInput);

  std::ofstream(dir / "dup.csv") << "1,1\n2,2\n1,1\n";
  CHECK(cli({"build", "--in", (dir / "dup.csv").string()}).code == kExitInput);
  std::ofstream(dir / "zero.csv") << "1,0\n2,2\n";
  CHECK(cli({"build", "--in", (dir / "zero.csv").string()}).code == kExitInput);
  std::ofstream(dir / "bad.json") << R"({"schema": "memnet.net", "version": 99})";
  CHECK(cli({"verify", "--net", (dir / "bad.json").string(), "--in", data.string()}).code == kExitInput);
}

TEST_CASE("oracle") {
  const Run ok = cli({"oracle", "all", "--n-max", "4"});
  CHECK(ok.code == kExitOk);
  const Run fault = cli({"oracle", "bits", "--n-max", "4", "--fault-shift", "1"});
  CHECK(fault.code == kExitFailure);
  CHECK(fault.out.find("witness") != std::string::npos);
}

TEST_CASE("sweep") {
  const fs::path dir = scratch("sweep");
  const std::string csv = (dir / "s.csv").string();
  CHECK(cli({"sweep", "--mode", "depth", "--n-list", "16,32", "--L-list", "1,2", "--out", csv}).code == kExitOk);
  const std::string text = slurp(csv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("installed binary") {
  const char* bin = std::getenv("MEMNET_BIN");
  if (bin == nullptr) return;
  const fs::path dir = scratch("binary");
  const fs::path data = write_data(dir, "d.csv", random_dataset(8, 2, 3, 1));
  const std::string base = std::string(bin) + " build --in " + data.string() + " --out " + (dir / "n.json").string();
  CHECK(WEXITSTATUS(std::system((base + " > /dev/null").c_str())) == 0);
  CHECK(WEXITSTATUS(std::system((std::string(bin) + " build --in /nonexistent.csv 2> /dev/null").c_str())) == 2);
  CHECK(WEXITSTATUS(std::system((std::string(bin) + " --help > /dev/null").c_str())) == 0);
}
