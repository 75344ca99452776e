#include "toromod/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>
#include <thread>

#include "json.hpp"
#include "toromod/io.hpp"
#include "toromod/log.hpp"

namespace toromod {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string fmt_compact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

double frac(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

}  // namespace

std::string GeometrySpec::id() const {
  std::string s;
  if (type == "ring") {
    s = "ring" + std::to_string(m) + "_L" + fmt_compact(L) + "_A" + fmt_compact(A);
  } else if (type == "torus") {
    s = "torus" + std::to_string(k_theta) + "x" + std::to_string(n_r) + "x" +
        std::to_string(n_phi) + "_L" + fmt_compact(L) + "_R" + fmt_compact(R) +
        "_" + (warp.empty() ? "flat" : warp);
  } else {
    s = "file:" + path;
  }
  if (scale != 1.0) s += "_s" + fmt_compact(scale);
  return s;
}

ToroidalComplex GeometrySpec::build() const {
  ToroidalComplex c;
  if (type == "ring") {
    c = build_ring(m, L, A);
  } else if (type == "torus") {
    c = build_solid_torus(k_theta, n_r, n_phi, L, R, make_warp(warp));
  } else if (type == "complex") {
    c = load_complex(path);
  } else {
    throw InvalidArgumentError("unknown geometry type '" + type + "'");
  }
  if (scale != 1.0) {
    c = scale_metric(c, scale);
    c.rebuild_adjacency();
  }
  return c;
}

DualityRow run_duality(const ToroidalComplex& c, double p, const DualityOptions& opts) {
  DualityRow row;
  row.q = c.q;
  row.p = clamp_exponent(p);
  row.p_star = row.p / (row.p - 1.0);

  SolveOptions solver_opts;
  solver_opts.tol = opts.tol;
  solver_opts.max_iter = opts.max_iter;
  CapacityOptions cap_opts;
  cap_opts.max_iter = opts.max_iter;

  CapacityReport cap_report;
  try {
    cap_report = solve_capacity(c, row.p, cap_opts);
    row.cap = cap_report.value;
    row.cap_iters = cap_report.iterations;
    row.cap_converged = cap_report.converged;
  } catch (const Error& ex) {
    row.failed = true;
    row.error = std::string("capacity: ") + ex.what();
    return row;
  }

  try {
    const SolveReport path_report = path_modulus(c, row.p, solver_opts);
    row.mod_paths = path_report.value;
    row.path_iters = path_report.iterations;
    row.path_converged = path_report.converged;
    if (opts.emit_fields) row.path_density = path_report.density.values;
  } catch (const Error& ex) {
    row.failed = true;
    row.error += std::string("paths: ") + ex.what() + "; ";
  }

  try {
    const SolveReport surf_report = surface_modulus(c, row.p_star, solver_opts);
    row.mod_surf = surf_report.value;
    row.surf_iters = surf_report.iterations;
    row.surf_converged = surf_report.converged;
    if (opts.emit_fields) row.surf_density = surf_report.density.values;
  } catch (const Error& ex) {
    row.failed = true;
    row.error += std::string("surfaces: ") + ex.what() + "; ";
  }

  row.product = std::pow(row.cap, 1.0 / row.p) * std::pow(row.mod_surf, 1.0 / row.p_star);
  row.gap_ratio = row.mod_paths > 0.0 ? row.cap / row.mod_paths : kInf;
  row.path_leq_cap = row.mod_paths <= row.cap + opts.tol * (1.0 + row.cap);

  // Per-cut upper bound: plug the cut-to-map density of the minimizer's
  // level cut into the variational inequality.
  try {
    const SeparatingCut cut = level_cut(c, cap_report.minimizer, opts.level);
    double max_ell = 0.0;
    for (const Edge& e : c.edges) max_ell = std::max(max_ell, e.ell);
    double eps = 2.5 * max_ell;
    for (int attempt = 0; attempt < 8; ++attempt) {
      try {
        const SurfaceMapResult built = surface_to_degree_one_map(c, cut.edges, eps);
        const VariationalCheck check = variational_check(
            c, cap_report, built.rho_psi, row.p, built.potential,
            std::max(1e-8, opts.tol));
        row.percut_rhs = check.rhs;
        row.percut_ok = check.ok;
        break;
      } catch (const EpsTooLargeError&) {
        eps *= 0.5;
      }
    }
    if (!row.percut_ok && row.error.empty()) {
      row.error = "percut: bound not established";
    }
  } catch (const Error& ex) {
    row.percut_ok = false;
    row.error += std::string("percut: ") + ex.what() + "; ";
  }

  if (opts.emit_fields) {
    row.cap_minimizer = cap_report.minimizer.values;
    row.cap_rho0 = cap_report.rho0.values;
  }
  return row;
}

double coarea_check(const ToroidalComplex& c, const CircleMap& f, const Density& g,
                    int n_levels) {
  if (n_levels < 1) throw InvalidArgumentError("coarea_check: n_levels must be >= 1");
  if (!g.is_valid() || g.size() != c.edges.size()) {
    throw InvalidArgumentError("coarea_check: bad density");
  }
  const std::vector<double> delta = edge_increments(c, f);
  if (degree(c, f) != 1) {
    throw InvalidArgumentError("coarea_check: map must have degree 1");
  }
  double lhs = 0.0;
  for (int kidx = 0; kidx < n_levels; ++kidx) {
    const double t = (kidx + 0.5) / n_levels;
    for (EdgeId e : level_crossing_edges(c, f, t)) lhs += g[e] * c.h(e);
  }
  lhs /= n_levels;
  double rhs = 0.0;
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    rhs += g[e] * (std::abs(delta[e]) / c.edges[e].ell) * c.edges[e].mu;
  }
  if (rhs == 0.0) return lhs > 0.0 ? kInf : 0.0;
  return lhs / rhs;
}

double isoperimetric_check(const ToroidalComplex& c, const CircleMap& f,
                           int sample_balls) {
  const std::vector<double> delta = edge_increments(c, f);
  if (degree(c, f) != 1) {
    throw InvalidArgumentError("isoperimetric_check: map must have degree 1");
  }
  const double lambda = 2.0;
  double t = 0.5;
  const std::vector<EdgeId> cut = level_crossing_edges(c, f, t);
  if (cut.empty()) return 0.0;
  std::vector<char> in_cut(c.edges.size(), 0);
  for (EdgeId e : cut) in_cut[e] = 1;

  // Sub/super-level sides in a quarter-period band around the cut.
  std::vector<int> side(c.vertices.size(), 0);
  for (VertexId v = 0; v < c.vertex_count(); ++v) {
    const double u = frac(f[v] - t);
    if (u > 0.0 && u <= 0.25) side[v] = +1;
    if (u >= 0.75 && u < 1.0) side[v] = -1;
  }

  std::set<VertexId> center_set;
  for (EdgeId e : cut) {
    center_set.insert(c.edges[e].u);
    center_set.insert(c.edges[e].v);
  }
  const std::vector<VertexId> centers(center_set.begin(), center_set.end());
  // Radii scale with the winding length so the statistic is about the
  // geometry, not the mesh; 2r stays within the quarter-period band.
  const double period = winding_cycle_oracle(c, Density(c.edges.size(), 1.0)).weight;
  const std::vector<double> radii = {0.05 * period, 0.075 * period, 0.1 * period,
                                     0.125 * period};

  const std::size_t total = centers.size() * radii.size();
  const std::size_t budget =
      sample_balls > 0 ? std::min<std::size_t>(sample_balls, total) : total;

  double worst = 0.0;
  std::vector<double> dist;
  VertexId cached_center = -1;
  for (std::size_t s = 0; s < budget; ++s) {
    const VertexId center = centers[s % centers.size()];
    const double r = radii[(s / centers.size()) % radii.size()];
    if (center != cached_center) {
      dist.assign(c.vertices.size(), kInf);
      using Item = std::pair<double, VertexId>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
      dist[center] = 0.0;
      heap.push({0.0, center});
      while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const auto& [e, dir] : c.adjacency[u]) {
          const Edge& ed = c.edges[e];
          const VertexId other = dir > 0 ? ed.v : ed.u;
          const double nd = d + ed.ell;
          if (nd < dist[other]) {
            dist[other] = nd;
            heap.push({nd, other});
          }
        }
      }
      cached_center = center;
    }
    double mu_ball = 0.0, mu_plus = 0.0, mu_minus = 0.0, mu_big = 0.0, h_cut = 0.0;
    for (EdgeId e = 0; e < c.edge_count(); ++e) {
      const Edge& ed = c.edges[e];
      const bool in_ball = dist[ed.u] <= r && dist[ed.v] <= r;
      const bool in_big = dist[ed.u] <= lambda * r && dist[ed.v] <= lambda * r;
      if (in_ball) {
        mu_ball += ed.mu;
        if (side[ed.u] == +1 && side[ed.v] == +1) mu_plus += ed.mu;
        if (side[ed.u] == -1 && side[ed.v] == -1) mu_minus += ed.mu;
      }
      if (in_big) {
        mu_big += ed.mu;
        if (in_cut[e]) h_cut += c.h(e);
      }
    }
    if (mu_ball <= 0.0 || mu_big <= 0.0 || h_cut <= 0.0) continue;
    const double num = std::min(mu_plus, mu_minus) / mu_ball;
    // diam(B) rather than r; the factor is absorbed into the estimated
    // constant and normalizes the exact ring case to one.
    const double den = 2.0 * r * h_cut / mu_big;
    if (den > 0.0) worst = std::max(worst, num / den);
  }
  return worst;
}

std::string SweepConfig::to_json() const {
  json doc;
  doc["p"] = p_values;
  doc["tol"] = tol;
  doc["max_iter"] = max_iter;
  doc["seed"] = seed;
  doc["jobs"] = jobs;
  doc["emit_fields"] = emit_fields;
  json geoms = json::array();
  for (const GeometrySpec& g : geometries) {
    json jg;
    jg["type"] = g.type;
    if (g.type == "ring") {
      jg["m"] = g.m;
      jg["L"] = g.L;
      jg["A"] = g.A;
    } else if (g.type == "torus") {
      jg["k_theta"] = g.k_theta;
      jg["n_r"] = g.n_r;
      jg["n_phi"] = g.n_phi;
      jg["L"] = g.L;
      jg["R"] = g.R;
      jg["warp"] = g.warp;
      if (!g.k_theta_ladder.empty()) jg["k_theta_ladder"] = g.k_theta_ladder;
    } else {
      jg["path"] = g.path;
    }
    if (g.scale != 1.0) jg["scale"] = g.scale;
    geoms.push_back(std::move(jg));
  }
  doc["geometries"] = std::move(geoms);
  return doc.dump();
}

SweepConfig SweepConfig::from_json(const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ParseError("malformed sweep config JSON");
  SweepConfig config;
  try {
    if (doc.contains("p")) config.p_values = doc["p"].get<std::vector<double>>();
    if (doc.contains("tol")) config.tol = doc["tol"].get<double>();
    if (doc.contains("max_iter")) config.max_iter = doc["max_iter"].get<int>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<unsigned>();
    if (doc.contains("jobs")) config.jobs = doc["jobs"].get<int>();
    if (doc.contains("emit_fields")) config.emit_fields = doc["emit_fields"].get<bool>();
    for (const json& jg : doc.value("geometries", json::array())) {
      GeometrySpec g;
      g.type = jg.value("type", std::string("ring"));
      g.m = jg.value("m", g.m);
      g.L = jg.value("L", g.L);
      g.A = jg.value("A", g.A);
      g.k_theta = jg.value("k_theta", g.k_theta);
      g.n_r = jg.value("n_r", g.n_r);
      g.n_phi = jg.value("n_phi", g.n_phi);
      g.R = jg.value("R", g.R);
      g.warp = jg.value("warp", g.warp);
      g.scale = jg.value("scale", g.scale);
      g.path = jg.value("path", g.path);
      if (jg.contains("k_theta_ladder")) {
        g.k_theta_ladder = jg["k_theta_ladder"].get<std::vector<int>>();
      }
      config.geometries.push_back(std::move(g));
    }
  } catch (const json::exception& ex) {
    throw ParseError(std::string("bad sweep config: ") + ex.what());
  }
  return config;
}

std::vector<DualityRow> sweep(const SweepConfig& config) {
  // Expand ladders into concrete geometry specs, then cross with p values.
  std::vector<GeometrySpec> specs;
  for (const GeometrySpec& g : config.geometries) {
    if (g.type == "torus" && !g.k_theta_ladder.empty()) {
      for (int k : g.k_theta_ladder) {
        GeometrySpec expanded = g;
        expanded.k_theta = k;
        expanded.k_theta_ladder.clear();
        specs.push_back(std::move(expanded));
      }
    } else {
      specs.push_back(g);
    }
  }
  struct Task {
    GeometrySpec geom;
    double p;
  };
  std::vector<Task> tasks;
  for (const GeometrySpec& g : specs) {
    for (double p : config.p_values) tasks.push_back({g, p});
  }

  std::vector<DualityRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      DualityRow& row = rows[t];
      row.geom = tasks[t].geom;
      row.p = tasks[t].p;
      try {
        const ToroidalComplex c = tasks[t].geom.build();
        DualityOptions opts;
        opts.tol = config.tol;
        opts.max_iter = config.max_iter;
        opts.emit_fields = config.emit_fields;
        DualityRow computed = run_duality(c, tasks[t].p, opts);
        computed.geom = tasks[t].geom;
        row = std::move(computed);
      } catch (const std::exception& ex) {
        row.failed = true;
        row.error = ex.what();
        row.p = clamp_exponent(tasks[t].p);
        row.p_star = row.p / (row.p - 1.0);
      }
      TOROMOD_LOG_INFO("sweep row " + std::to_string(t) + " done: " +
                       row.geom.id() + " p=" + fmt_compact(row.p));
    }
  };
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return rows;
}

std::string rows_to_csv(const SweepConfig& config, const std::vector<DualityRow>& rows) {
  std::string out = "# config " + config.to_json() + "\n";
  out +=
      "geometry_id,k_theta,n_r,n_phi,L,R,warp,q,p,p_star,cap,mod_paths,mod_surf,"
      "product,gap_ratio,cap_iters,cap_converged,path_converged,surf_converged,"
      "percut_ok,row_ok\n";
  for (const DualityRow& row : rows) {
    const GeometrySpec& g = row.geom;
    const bool is_ring = g.type == "ring";
    const bool row_ok = !row.failed && row.cap_converged && row.path_converged &&
                        row.surf_converged && row.path_leq_cap && row.percut_ok;
    out += g.id();
    out += "," + std::to_string(is_ring ? g.m : g.k_theta);
    out += "," + std::to_string(is_ring ? 0 : g.n_r);
    out += "," + std::to_string(is_ring ? 0 : g.n_phi);
    out += "," + fmt_g(g.L);
    out += "," + fmt_g(is_ring ? 0.0 : g.R);
    out += "," + (is_ring ? std::string("flat") : g.warp);
    out += "," + fmt_g(row.q);
    out += "," + fmt_g(row.p);
    out += "," + fmt_g(row.p_star);
    out += "," + fmt_g(row.cap);
    out += "," + fmt_g(row.mod_paths);
    out += "," + fmt_g(row.mod_surf);
    out += "," + fmt_g(row.product);
    out += "," + fmt_g(row.gap_ratio);
    out += "," + std::to_string(row.cap_iters);
    out += "," + std::to_string(row.cap_converged ? 1 : 0);
    out += "," + std::to_string(row.path_converged ? 1 : 0);
    out += "," + std::to_string(row.surf_converged ? 1 : 0);
    out += "," + std::to_string(row.percut_ok ? 1 : 0);
    out += "," + std::to_string(row_ok ? 1 : 0);
    out += "\n";
  }
  return out;
}

std::string rows_to_json(const SweepConfig& config, const std::vector<DualityRow>& rows) {
  json doc;
  doc["config"] = json::parse(config.to_json());
  json jrows = json::array();
  for (const DualityRow& row : rows) {
    json jr;
    jr["geometry_id"] = row.geom.id();
    jr["q"] = row.q;
    jr["p"] = row.p;
    jr["p_star"] = row.p_star;
    jr["cap"] = row.cap;
    jr["mod_paths"] = row.mod_paths;
    jr["mod_surf"] = row.mod_surf;
    jr["product"] = row.product;
    jr["gap_ratio"] = std::isfinite(row.gap_ratio) ? row.gap_ratio : -1.0;
    jr["cap_iters"] = row.cap_iters;
    jr["cap_converged"] = row.cap_converged;
    jr["path_converged"] = row.path_converged;
    jr["surf_converged"] = row.surf_converged;
    jr["path_leq_cap"] = row.path_leq_cap;
    jr["percut_rhs"] = row.percut_rhs;
    jr["percut_ok"] = row.percut_ok;
    jr["failed"] = row.failed;
    if (!row.error.empty()) jr["error"] = row.error;
    if (!row.cap_minimizer.empty()) {
      jr["cap_minimizer"] = row.cap_minimizer;
      jr["cap_rho0"] = row.cap_rho0;
      jr["path_density"] = row.path_density;
      jr["surf_density"] = row.surf_density;
    }
    jrows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(jrows);
  return doc.dump(2) + "\n";
}

}  // namespace toromod
