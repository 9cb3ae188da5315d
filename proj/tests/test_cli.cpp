// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line tool: exit codes, artifact layout
// and determinism. Exercised through the real binary (paths injected by the
// build) so the contract is tested exactly as a user sees it.

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kBin = PERIWAVE_CLI_BIN;
const fs::path kConfigs = PERIWAVE_CONFIG_DIR;

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() /
                       ("periwave_cli_log_" + std::to_string(counter++) + ".txt");
  const std::string cmd = kBin + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(log);
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("periwave_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// drop the trailing wall_seconds column (the only nondeterministic field)
std::string strip_wall_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out << (pos == std::string::npos ? line : line.substr(0, pos)) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("version prints the artifact version") {
  auto r = run_cmd("version");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("periwave") != std::string::npos);
}

TEST_CASE("demo run converges with a monotone functional column") {
  const auto dir = fresh_dir("demo");
  auto r = run_cmd("run --config " + (kConfigs / "demo_1d.json").string() +
                   " --output-dir " + dir.string());
  REQUIRE(r.exit_code == 0);

  const std::string csv = read_file(dir / "convergence.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "iter,rho,sqrt_rho_rel,functional_F,period_solves,wall_seconds");
  double prev = 0.0;
  bool first = true;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (int c = 0; c < 4; ++c) std::getline(row, cell, ',');
    const double f = std::stod(cell);
    if (!first) REQUIRE(f <= prev);
    prev = f;
    first = false;
  }

  Json man = Json::parse(read_file(dir / "manifest.json"));
  REQUIRE(man["status"] == "converged");
  REQUIRE(man["analytic_error"]["l2_rel"].get<double>() < 0.05);
  REQUIRE(fs::exists(dir / "u0.f64"));
  REQUIRE(fs::exists(dir / "u0.json"));
}

TEST_CASE("rerun of an identical config is deterministic up to wall time") {
  const auto d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  const std::string cfg = (kConfigs / "demo_1d.json").string();
  REQUIRE(run_cmd("run --config " + cfg + " --output-dir " + d1.string()).exit_code == 0);
  REQUIRE(run_cmd("run --config " + cfg + " --output-dir " + d2.string()).exit_code == 0);
  REQUIRE(strip_wall_seconds(read_file(d1 / "convergence.csv")) ==
          strip_wall_seconds(read_file(d2 / "convergence.csv")));
  REQUIRE(read_file(d1 / "u0.f64") == read_file(d2 / "u0.f64"));
}

TEST_CASE("a time step above the CFL bound exits with the instability code") {
  const auto dir = fresh_dir("unstable");
  auto r = run_cmd("run --config " + (kConfigs / "unstable_1d.json").string() +
                   " --output-dir " + dir.string());
  REQUIRE(r.exit_code == 3);
  Json man = Json::parse(read_file(dir / "manifest.json"));
  REQUIRE(man["status"] == "instability");
  REQUIRE(man["failing_step"].get<int>() >= 1);
}

TEST_CASE("iteration cap exit code") {
  const auto dir = fresh_dir("cap");
  auto r = run_cmd("run --config " + (kConfigs / "scatter_2d.json").string() +
                   " --output-dir " + dir.string() + " --tol 1e-24 --max-iters 3");
  REQUIRE(r.exit_code == 2);
  Json man = Json::parse(read_file(dir / "manifest.json"));
  REQUIRE(man["status"] == "iteration_cap");
}

TEST_CASE("config errors exit with 64") {
  auto r = run_cmd("run --config /nonexistent.json --output-dir /tmp/periwave_na");
  REQUIRE(r.exit_code == 64);

  const auto dir = fresh_dir("badcfg");
  std::ofstream(dir / "bad.json") << "{ not json";
  r = run_cmd("run --config " + (dir / "bad.json").string() + " --output-dir " +
              dir.string());
  REQUIRE(r.exit_code == 64);

  // tampered material
  Json j = Json::parse(read_file(kConfigs / "oracle_1d.json"));
  j["material"]["eps"] = -1.0;
  std::ofstream(dir / "neg_eps.json") << j.dump();
  r = run_cmd("oracle-check --config " + (dir / "neg_eps.json").string());
  REQUIRE(r.exit_code == 64);

  // degenerate period
  j = Json::parse(read_file(kConfigs / "oracle_1d.json"));
  j["drive"]["omega"] = 0.0;
  std::ofstream(dir / "zero_omega.json") << j.dump();
  r = run_cmd("oracle-check --config " + (dir / "zero_omega.json").string());
  REQUIRE(r.exit_code == 64);
}

TEST_CASE("single-level sweep is rejected") {
  auto r = run_cmd("sweep --config " + (kConfigs / "demo_1d.json").string() +
                   " --levels 1");
  REQUIRE(r.exit_code == 64);
}

TEST_CASE("oracle-check passes on the bundled tiny grid") {
  auto r = run_cmd("oracle-check --config " + (kConfigs / "oracle_1d.json").string());
  INFO(r.out);
  REQUIRE(r.exit_code == 0);
  Json rep = Json::parse(r.out);
  REQUIRE(rep["all_pass"] == true);
  REQUIRE(rep["identities"]["pass"] == true);
  REQUIRE(rep["duhamel_vs_stepper"]["pass"] == true);
  REQUIRE(rep["direct_vs_cg"]["pass"] == true);
}

TEST_CASE("oracle-check refuses oversized grids with guidance") {
  const auto dir = fresh_dir("bigoracle");
  Json j = Json::parse(read_file(kConfigs / "oracle_1d.json"));
  j["grid"]["cells"] = {5000};
  j["grid"]["spacing"] = {0.0006};
  std::ofstream(dir / "big.json") << j.dump();
  auto r = run_cmd("oracle-check --config " + (dir / "big.json").string());
  REQUIRE(r.exit_code == 64);
  REQUIRE(r.out.find("shrink") != std::string::npos);
}
