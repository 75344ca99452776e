// End-to-end checks of the toromod binary: exit codes, output grammar, and
// byte-level determinism. The binary path comes from the build system.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#ifndef TOROMOD_CLI_PATH
#error "TOROMOD_CLI_PATH must be defined by the build"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                               "/toromod_cli_out.txt";
  const std::string cmd =
      std::string(TOROMOD_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  return result;
}

// value of a named column in the first data row of a CSV report
double csv_field(const std::string& csv, const std::string& column) {
  std::stringstream in(csv);
  std::string line, header;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      header = line;
      break;
    }
  }
  std::string row;
  REQUIRE(std::getline(in, row));
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  const auto names = split(header);
  const auto cells = split(row);
  for (std::size_t i = 0; i < names.size() && i < cells.size(); ++i) {
    if (names[i] == column) return std::stod(cells[i]);
  }
  REQUIRE(false);
  return 0.0;
}

}  // namespace

TEST_CASE("duality on the unit ring prints product one") {
  const RunResult r = run_cli("duality --ring 3 --L 1 --A 1 --p 2");
  REQUIRE(r.exit_code == 0);
  const double product = csv_field(r.out, "product");
  CHECK(std::abs(product - 1.0) <= 1e-9);
  CHECK(csv_field(r.out, "row_ok") == 1.0);
}

TEST_CASE("selftest passes") {
  const RunResult r = run_cli("selftest");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("missing complex file is an input error") {
  const RunResult r = run_cli("cap --complex /nonexistent/m.json --p 2");
  CHECK(r.exit_code == 2);
}

TEST_CASE("solver non-convergence exits with code one") {
  const RunResult r =
      run_cli("cap --torus 6 2 5 --warp sin:0.5 --p 3 --max-iter 1");
  CHECK(r.exit_code == 1);
  CHECK(csv_field(r.out, "converged") == 0.0);
}

TEST_CASE("usage errors exit with the grammar code") {
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("cap --ring 3 --torus 4 2 4 --p 2").exit_code == 2);  // both geometries
  CHECK(run_cli("mesh --ring 3").exit_code == 2);                     // --out required
}

TEST_CASE("mesh, validate and solve round-trip through a file") {
  const std::string dir = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  const std::string mesh_path = dir + "/toromod_cli_mesh.json";
  REQUIRE(run_cli("mesh --torus 6 2 5 --L 1 --R 1 --out " + mesh_path).exit_code == 0);
  const RunResult v = run_cli("validate --complex " + mesh_path);
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("ok:") != std::string::npos);
  const RunResult c = run_cli("cap --complex " + mesh_path + " --p 2");
  CHECK(c.exit_code == 0);
  CHECK(csv_field(c.out, "converged") == 1.0);

  // corrupt the file: validation reports and exits nonzero
  {
    std::ofstream bad(mesh_path, std::ios::app);
    bad << "trailing garbage";
  }
  CHECK(run_cli("validate --complex " + mesh_path).exit_code == 2);
}

TEST_CASE("config files sit between defaults and flags") {
  const std::string dir = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  const std::string config_path = dir + "/toromod_cli_runcfg.json";
  {
    std::ofstream cfg(config_path);
    cfg << R"({"geometry":{"type":"ring","m":4,"L":2,"A":3},"p":[3]})";
  }
  // geometry and p from the config
  const RunResult from_config = run_cli("duality --config " + config_path);
  REQUIRE(from_config.exit_code == 0);
  CHECK(csv_field(from_config.out, "p") == 3.0);
  CHECK(from_config.out.find("ring4_L2_A3") != std::string::npos);
  CHECK(std::abs(csv_field(from_config.out, "product") - 1.0) <= 1e-6);
  // an explicit flag overrides the config's p list
  const RunResult with_flag = run_cli("duality --config " + config_path + " --p 2");
  REQUIRE(with_flag.exit_code == 0);
  CHECK(csv_field(with_flag.out, "p") == 2.0);
}

TEST_CASE("sweep emits byte-identical reports for identical config and seed") {
  const std::string dir = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  const std::string config_path = dir + "/toromod_cli_sweep.json";
  {
    std::ofstream cfg(config_path);
    cfg << R"({"geometries":[{"type":"ring","m":4,"L":2,"A":3},)"
        << R"({"type":"torus","k_theta":6,"n_r":2,"n_phi":5,"L":1,"R":1,"warp":"sin:0.25"}],)"
        << R"("p":[1.5,2],"seed":7})";
  }
  const std::string out1 = dir + "/toromod_sweep1.csv";
  const std::string out2 = dir + "/toromod_sweep2.csv";
  REQUIRE(run_cli("sweep --config " + config_path + " --out " + out1).exit_code == 0);
  REQUIRE(run_cli("sweep --config " + config_path + " --out " + out2).exit_code == 0);
  const std::string a = slurp(out1);
  const std::string b = slurp(out2);
  REQUIRE_FALSE(a.empty());
  CHECK(a == b);

  // JSON format carries the config echo
  const RunResult j = run_cli("sweep --config " + config_path + " --format json");
  REQUIRE(j.exit_code == 0);
  CHECK(j.out.find("\"config\"") != std::string::npos);
  CHECK(j.out.find("\"seed\": 7") != std::string::npos);
}
