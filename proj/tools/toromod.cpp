// Command-line front end: build/validate/solve/sweep over toroidal complexes
// with reproducible CSV/JSON reports.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "toromod/capacity.hpp"
#include "toromod/complex.hpp"
#include "toromod/family_paths.hpp"
#include "toromod/family_surfaces.hpp"
#include "toromod/harness.hpp"
#include "toromod/io.hpp"
#include "toromod/log.hpp"
#include "toromod/modulus.hpp"

namespace {

using nlohmann::json;
using namespace toromod;

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitInputError = 2;

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// Flag values shared by the solver subcommands; config file first, flags win.
struct Cli {
  std::vector<int> ring;   // m
  std::vector<int> torus;  // k_theta n_r n_phi
  double L = 1.0;
  double A = 1.0;
  double R = 1.0;
  std::string warp = "flat";
  std::string complex_path;
  std::vector<double> p_values;
  double tol = 1e-6;
  int max_iter = 10000;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
  unsigned seed = 0;
  bool emit_fields = false;
  std::string config_path;
};

void add_geometry_flags(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--ring", cli.ring, "ring geometry: m")->expected(1);
  cmd->add_option("--torus", cli.torus, "torus geometry: k_theta n_r n_phi")->expected(3);
  cmd->add_option("--L", cli.L, "tube length");
  cmd->add_option("--A", cli.A, "ring cross-section measure");
  cmd->add_option("--R", cli.R, "torus disk radius");
  cmd->add_option("--warp", cli.warp, "warp preset: flat | sin:beta");
  cmd->add_option("--complex", cli.complex_path, "load complex from file");
}

void add_solver_flags(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--p", cli.p_values, "exponent(s), repeatable (default 2)");
  cmd->add_option("--tol", cli.tol, "solver tolerance")->capture_default_str();
  cmd->add_option("--max-iter", cli.max_iter, "solver iteration budget")
      ->capture_default_str();
  cmd->add_option("--out", cli.out, "output path (default stdout)");
  cmd->add_option("--format", cli.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--jobs", cli.jobs, "worker threads for sweeps")
      ->capture_default_str();
  cmd->add_option("--seed", cli.seed, "seed echoed into reports")
      ->capture_default_str();
  cmd->add_flag("--emit-fields", cli.emit_fields, "embed density payloads in JSON rows");
  cmd->add_option("--config", cli.config_path,
                  "JSON config; defaults < config < flags");
}

// Apply config-file values underneath whatever flags the user passed.
void merge_config(const CLI::App* cmd, Cli& cli) {
  if (cli.config_path.empty()) return;
  std::ifstream in(cli.config_path);
  if (!in) throw Error("cannot open config '" + cli.config_path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ParseError("malformed config JSON");
  auto flag_given = [&](const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (!flag_given("--p") && doc.contains("p")) {
    cli.p_values = doc["p"].get<std::vector<double>>();
  }
  if (!flag_given("--tol") && doc.contains("tol")) cli.tol = doc["tol"].get<double>();
  if (!flag_given("--max-iter") && doc.contains("max_iter")) {
    cli.max_iter = doc["max_iter"].get<int>();
  }
  if (!flag_given("--out") && doc.contains("out")) cli.out = doc["out"].get<std::string>();
  if (!flag_given("--format") && doc.contains("format")) {
    cli.format = doc["format"].get<std::string>();
  }
  if (!flag_given("--jobs") && doc.contains("jobs")) cli.jobs = doc["jobs"].get<int>();
  if (!flag_given("--seed") && doc.contains("seed")) cli.seed = doc["seed"].get<unsigned>();
  if (!flag_given("--emit-fields") && doc.contains("emit_fields")) {
    cli.emit_fields = doc["emit_fields"].get<bool>();
  }
  if (doc.contains("geometry") && !flag_given("--ring") && !flag_given("--torus") &&
      !flag_given("--complex")) {
    const json& jg = doc["geometry"];
    const std::string type = jg.value("type", std::string("ring"));
    if (type == "ring") {
      cli.ring = {jg.value("m", 8)};
    } else if (type == "torus") {
      cli.torus = {jg.value("k_theta", 16), jg.value("n_r", 3), jg.value("n_phi", 8)};
    } else {
      cli.complex_path = jg.value("path", std::string());
    }
    cli.L = jg.value("L", cli.L);
    cli.A = jg.value("A", cli.A);
    cli.R = jg.value("R", cli.R);
    cli.warp = jg.value("warp", cli.warp);
  }
}

GeometrySpec geometry_from_cli(const Cli& cli) {
  GeometrySpec g;
  const int picked = (!cli.ring.empty() ? 1 : 0) + (!cli.torus.empty() ? 1 : 0) +
                     (!cli.complex_path.empty() ? 1 : 0);
  if (picked != 1) {
    throw InvalidArgumentError("pick exactly one of --ring, --torus, --complex");
  }
  if (!cli.ring.empty()) {
    g.type = "ring";
    g.m = cli.ring[0];
    g.L = cli.L;
    g.A = cli.A;
  } else if (!cli.torus.empty()) {
    g.type = "torus";
    g.k_theta = cli.torus[0];
    g.n_r = cli.torus[1];
    g.n_phi = cli.torus[2];
    g.L = cli.L;
    g.R = cli.R;
    g.warp = cli.warp;
  } else {
    g.type = "complex";
    g.path = cli.complex_path;
  }
  return g;
}

SweepConfig sweep_config_from_cli(const Cli& cli, const GeometrySpec& g) {
  SweepConfig config;
  config.geometries = {g};
  config.p_values = cli.p_values.empty() ? std::vector<double>{2.0} : cli.p_values;
  config.tol = cli.tol;
  config.max_iter = cli.max_iter;
  config.seed = cli.seed;
  config.jobs = cli.jobs;
  config.emit_fields = cli.emit_fields;
  return config;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot open '" + out_path + "' for writing");
  out << text;
}

int emit_rows(const Cli& cli, const SweepConfig& config,
              const std::vector<DualityRow>& rows) {
  write_output(cli.format == "json" ? rows_to_json(config, rows)
                                    : rows_to_csv(config, rows),
               cli.out);
  for (const DualityRow& row : rows) {
    if (row.failed || !row.cap_converged || !row.path_converged ||
        !row.surf_converged) {
      return kExitNotConverged;
    }
  }
  return kExitOk;
}

// Single-solver reports (cap, modpaths, modsurf) share one small table.
struct ScalarRow {
  std::string geometry_id;
  double p = 2.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> density;
};

int emit_scalar_rows(const Cli& cli, const std::string& quantity,
                     const SweepConfig& config, const std::vector<ScalarRow>& rows) {
  std::string text;
  if (cli.format == "json") {
    json doc;
    doc["config"] = json::parse(config.to_json());
    doc["quantity"] = quantity;
    json jrows = json::array();
    for (const ScalarRow& r : rows) {
      json jr;
      jr["geometry_id"] = r.geometry_id;
      jr["p"] = r.p;
      jr["value"] = r.value;
      jr["iterations"] = r.iterations;
      jr["converged"] = r.converged;
      if (!r.density.empty()) jr["density"] = r.density;
      jrows.push_back(std::move(jr));
    }
    doc["rows"] = std::move(jrows);
    text = doc.dump(2) + "\n";
  } else {
    text = "# config " + config.to_json() + "\n";
    text += "geometry_id,p," + quantity + ",iterations,converged\n";
    for (const ScalarRow& r : rows) {
      text += r.geometry_id + "," + fmt_g(r.p) + "," + fmt_g(r.value) + "," +
              std::to_string(r.iterations) + "," + (r.converged ? "1" : "0") + "\n";
    }
  }
  write_output(text, cli.out);
  for (const ScalarRow& r : rows) {
    if (!r.converged) return kExitNotConverged;
  }
  return kExitOk;
}

int run_scalar_command(const Cli& cli, const std::string& quantity) {
  const GeometrySpec g = geometry_from_cli(cli);
  const SweepConfig config = sweep_config_from_cli(cli, g);
  const ToroidalComplex c = g.build();
  std::vector<ScalarRow> rows;
  for (double p : config.p_values) {
    ScalarRow row;
    row.geometry_id = g.id();
    SolveOptions so;
    so.tol = cli.tol;
    so.max_iter = cli.max_iter;
    if (quantity == "cap") {
      CapacityOptions co;
      co.max_iter = cli.max_iter;
      const CapacityReport rep = solve_capacity(c, p, co);
      row.p = rep.p;
      row.value = rep.value;
      row.iterations = rep.iterations;
      row.converged = rep.converged;
      if (cli.emit_fields) row.density = rep.rho0.values;
    } else {
      const SolveReport rep = quantity == "mod_paths"
                                  ? path_modulus(c, p, so)
                                  : surface_modulus(c, p / (p - 1.0), so);
      row.p = rep.p;
      row.value = rep.value;
      row.iterations = rep.iterations;
      row.converged = rep.converged;
      if (cli.emit_fields) row.density = rep.density.values;
    }
    rows.push_back(std::move(row));
  }
  return emit_scalar_rows(cli, quantity, config, rows);
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

// Ring closed-form suite: capacity, both moduli and the duality product on
// degenerate geometries where they are exact.
int run_selftest() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++failures;
  };
  for (int m : {3, 4, 8}) {
    for (double L : {1.0, 2.0}) {
      for (double A : {1.0, 3.0}) {
        const ToroidalComplex ring = build_ring(m, L, A);
        for (double p : {1.5, 2.0, 3.0}) {
          const double p_star = p / (p - 1.0);
          SolveOptions so;
          so.tol = 1e-8;
          const CapacityReport cap = solve_capacity(ring, p);
          const SolveReport paths = path_modulus(ring, p, so);
          const SolveReport surf = surface_modulus(ring, p_star, so);
          const double cap_want = A * std::pow(L, 1.0 - p);
          const double surf_want = L * std::pow(A, 1.0 - p_star);
          const double product =
              std::pow(cap.value, 1.0 / p) * std::pow(surf.value, 1.0 / p_star);
          char label[128];
          std::snprintf(label, sizeof(label), "ring(m=%d,L=%g,A=%g) p=%g", m, L, A, p);
          check(cap.converged && close_rel(cap.value, cap_want, 1e-6),
                std::string(label) + " capacity closed form");
          check(paths.converged && close_rel(paths.value, cap_want, 1e-6),
                std::string(label) + " path modulus closed form");
          check(surf.converged && close_rel(surf.value, surf_want, 1e-6),
                std::string(label) + " surface modulus closed form");
          check(close_rel(product, 1.0, 1e-6), std::string(label) + " duality product");
        }
      }
    }
  }
  std::printf("selftest: %d failure(s)\n", failures);
  return failures == 0 ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete p-capacity and p-modulus duality on toroidal complexes"};
  app.require_subcommand(1);

  Cli cli;
  CLI::App* mesh = app.add_subcommand("mesh", "build a complex and save it");
  add_geometry_flags(mesh, cli);
  mesh->add_option("--out", cli.out, "output path")->required();

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a complex file");
  validate_cmd->add_option("--complex", cli.complex_path, "complex file")->required();

  CLI::App* cap_cmd = app.add_subcommand("cap", "degree-1 p-capacity");
  CLI::App* modpaths_cmd = app.add_subcommand("modpaths", "p-modulus of winding cycles");
  CLI::App* modsurf_cmd =
      app.add_subcommand("modsurf", "p*-modulus of separating surfaces");
  CLI::App* duality_cmd =
      app.add_subcommand("duality", "capacity, moduli and the duality product");
  for (CLI::App* cmd : {cap_cmd, modpaths_cmd, modsurf_cmd, duality_cmd}) {
    add_geometry_flags(cmd, cli);
    add_solver_flags(cmd, cli);
  }

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "duality table over a config");
  add_solver_flags(sweep_cmd, cli);

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "ring closed-form suite");
  (void)selftest_cmd;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (mesh->parsed()) {
      const GeometrySpec g = geometry_from_cli(cli);
      save_complex(g.build(), cli.out);
      return kExitOk;
    }
    if (validate_cmd->parsed()) {
      const ToroidalComplex c = load_complex_unchecked(cli.complex_path);
      const ValidationReport report = validate(c);
      if (report.ok()) {
        std::printf("ok: %d vertices, %d edges, %zu faces\n", c.vertex_count(),
                    c.edge_count(), c.faces.size());
        return kExitOk;
      }
      for (const Violation& v : report.violations) {
        std::printf("violation [%s] %s\n", v.code.c_str(), v.message.c_str());
      }
      return kExitInputError;
    }
    if (selftest_cmd->parsed()) {
      return run_selftest();
    }

    CLI::App* solver_cmd = cap_cmd->parsed()       ? cap_cmd
                           : modpaths_cmd->parsed() ? modpaths_cmd
                           : modsurf_cmd->parsed()  ? modsurf_cmd
                           : duality_cmd->parsed()  ? duality_cmd
                                                    : sweep_cmd;
    merge_config(solver_cmd, cli);

    if (sweep_cmd->parsed()) {
      if (cli.config_path.empty()) {
        throw InvalidArgumentError("sweep requires --config");
      }
      std::ifstream in(cli.config_path);
      if (!in) throw Error("cannot open config '" + cli.config_path + "'");
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      SweepConfig config = SweepConfig::from_json(text);
      // Flag overrides on top of the sweep config.
      if (sweep_cmd->get_option("--jobs")->count() > 0) config.jobs = cli.jobs;
      if (sweep_cmd->get_option("--tol")->count() > 0) config.tol = cli.tol;
      if (sweep_cmd->get_option("--max-iter")->count() > 0) config.max_iter = cli.max_iter;
      if (sweep_cmd->get_option("--seed")->count() > 0) config.seed = cli.seed;
      if (sweep_cmd->get_option("--emit-fields")->count() > 0) {
        config.emit_fields = cli.emit_fields;
      }
      const std::vector<DualityRow> rows = sweep(config);
      return emit_rows(cli, config, rows);
    }
    if (duality_cmd->parsed()) {
      const GeometrySpec g = geometry_from_cli(cli);
      const SweepConfig config = sweep_config_from_cli(cli, g);
      const std::vector<DualityRow> rows = sweep(config);
      return emit_rows(cli, config, rows);
    }
    if (cap_cmd->parsed()) return run_scalar_command(cli, "cap");
    if (modpaths_cmd->parsed()) return run_scalar_command(cli, "mod_paths");
    if (modsurf_cmd->parsed()) return run_scalar_command(cli, "mod_surf");
  } catch (const ParseError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitInputError;
  } catch (const ValidationError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitInputError;
  } catch (const InvalidArgumentError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitInputError;
  } catch (const Error& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitInputError;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "internal error: %s\n", ex.what());
    return kExitInputError;
  }
  return kExitOk;
}
