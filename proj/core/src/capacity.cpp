#include "toromod/capacity.hpp"

#include <algorithm>
#include <cmath>

namespace toromod {

namespace {

void check_solvable(const ToroidalComplex& c) {
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    if (!(c.edges[e].mu > 0.0) || !std::isfinite(c.edges[e].mu) ||
        !(c.edges[e].ell > 0.0) || !std::isfinite(c.edges[e].ell)) {
      throw DegenerateComplexError(
          "capacity energy is non-coercive: edge " + std::to_string(e) +
          " has nonpositive measure or length");
    }
  }
  if (c.adjacency.size() != c.vertices.size()) {
    throw InvalidArgumentError("solve_capacity: adjacency not built");
  }
}

void project_mean_zero(std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Conjugate gradients on the weighted Laplacian system for p = 2, with
// Jacobi preconditioning; the right-hand side is mean-free so the singular
// direction never enters.
struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  bool converged = false;
};

CgResult solve_p2(const ToroidalComplex& c, const std::vector<double>& x0) {
  const int n = c.vertex_count();
  std::vector<double> k(c.edges.size());
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    k[e] = c.edges[e].mu / (c.edges[e].ell * c.edges[e].ell);
  }
  std::vector<double> b(n, 0.0), diag(n, 0.0);
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    b[ed.v] -= k[e] * ed.w;
    b[ed.u] += k[e] * ed.w;
    diag[ed.u] += k[e];
    diag[ed.v] += k[e];
  }
  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (EdgeId e = 0; e < c.edge_count(); ++e) {
      const Edge& ed = c.edges[e];
      const double d = k[e] * (x[ed.u] - x[ed.v]);
      out[ed.u] += d;
      out[ed.v] -= d;
    }
  };

  CgResult res;
  res.x = x0;
  project_mean_zero(res.x);
  std::vector<double> r(n), z(n), pdir(n), Ap(n);
  apply(res.x, Ap);
  for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  const double bnorm = std::max(norm2(b), 1e-300);
  const double target = 1e-12 * bnorm;
  const double accept = 1e-10 * bnorm;
  for (int i = 0; i < n; ++i) z[i] = diag[i] > 0.0 ? r[i] / diag[i] : r[i];
  pdir = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];
  const int max_iters = std::max(200, 20 * n);
  int it = 0;
  for (; it < max_iters; ++it) {
    if (norm2(r) <= target) break;
    apply(pdir, Ap);
    double pAp = 0.0;
    for (int i = 0; i < n; ++i) pAp += pdir[i] * Ap[i];
    if (!(pAp > 0.0)) break;
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      res.x[i] += alpha * pdir[i];
      r[i] -= alpha * Ap[i];
    }
    for (int i = 0; i < n; ++i) z[i] = diag[i] > 0.0 ? r[i] / diag[i] : r[i];
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) pdir[i] = z[i] + beta * pdir[i];
  }
  res.iterations = it;
  res.converged = norm2(r) <= accept;
  project_mean_zero(res.x);
  return res;
}

struct DescentResult {
  std::vector<double> x;
  int iterations = 0;
  bool converged = false;
};

// Backtracking gradient descent with Barzilai-Borwein step seeding; the
// energy is smooth and convex for p > 1.
DescentResult descend(const ToroidalComplex& c, double p, std::vector<double> x,
                      double tol, int max_iter) {
  DescentResult res;
  project_mean_zero(x);
  double energy = capacity_energy(c, x, p);
  std::vector<double> grad = capacity_gradient(c, x, p);
  std::vector<double> x_prev, grad_prev;
  double eta = 0.0;
  {
    // Crude inverse-curvature seed from the quadratic comparison weights.
    double curv = 0.0;
    for (EdgeId e = 0; e < c.edge_count(); ++e) {
      curv = std::max(curv, c.edges[e].mu / std::pow(c.edges[e].ell, p));
    }
    eta = curv > 0.0 ? 0.5 / (p * curv) : 1.0;
  }
  int it = 0;
  std::vector<double> cand(x.size());
  for (; it < max_iter; ++it) {
    const double gnorm = norm2(grad);
    if (gnorm <= tol * (1.0 + std::abs(energy))) {
      res.converged = true;
      break;
    }
    if (!x_prev.empty()) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double sx = x[i] - x_prev[i];
        const double yg = grad[i] - grad_prev[i];
        sy += sx * yg;
        yy += yg * yg;
      }
      if (sy > 0.0 && yy > 0.0) eta = std::clamp(sy / yy, 1e-14, 1e14);
    }
    double step = eta;
    bool accepted = false;
    for (int back = 0; back < 80; ++back) {
      for (std::size_t i = 0; i < x.size(); ++i) cand[i] = x[i] - step * grad[i];
      const double cand_energy = capacity_energy(c, cand, p);
      if (cand_energy <= energy - 1e-4 * step * gnorm * gnorm) {
        x_prev = x;
        grad_prev = grad;
        x.swap(cand);
        energy = cand_energy;
        grad = capacity_gradient(c, x, p);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = gnorm <= 10.0 * tol * (1.0 + std::abs(energy));
      break;
    }
    if ((it & 63) == 0) project_mean_zero(x);
  }
  res.iterations = it;
  project_mean_zero(x);
  res.x = std::move(x);
  return res;
}

double frac(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r = 0.0;
  return r;
}

}  // namespace

double capacity_energy(const ToroidalComplex& c, const std::vector<double>& x, double p) {
  double energy = 0.0;
  for (const Edge& e : c.edges) {
    const double delta = x[e.v] - x[e.u] + e.w;
    energy += e.mu * std::pow(std::abs(delta) / e.ell, p);
  }
  return energy;
}

std::vector<double> capacity_gradient(const ToroidalComplex& c,
                                      const std::vector<double>& x, double p) {
  std::vector<double> grad(x.size(), 0.0);
  for (const Edge& e : c.edges) {
    const double delta = x[e.v] - x[e.u] + e.w;
    const double mag = std::abs(delta);
    if (mag == 0.0) continue;
    const double d = p * e.mu * std::pow(mag, p - 1.0) *
                     (delta > 0.0 ? 1.0 : -1.0) / std::pow(e.ell, p);
    grad[e.v] += d;
    grad[e.u] -= d;
  }
  return grad;
}

CapacityReport solve_capacity(const ToroidalComplex& c, double p,
                              const CapacityOptions& opts) {
  check_solvable(c);
  CapacityReport report;
  report.p = clamp_exponent(p);
  const double tol = opts.tol > 0.0 ? opts.tol : (report.p == 2.0 ? 1e-8 : 1e-6);
  const int n = c.vertex_count();

  std::vector<double> x(n, 0.0);
  if (opts.init) {
    if (static_cast<int>(opts.init->size()) != n) {
      throw InvalidArgumentError("solve_capacity: init size does not match complex");
    }
    x = *opts.init;
    project_mean_zero(x);
  }

  int iterations = 0;
  bool converged = false;
  if (!opts.init || report.p == 2.0) {
    CgResult cg = solve_p2(c, x);
    x = std::move(cg.x);
    iterations += cg.iterations;
    converged = cg.converged;
  }
  if (report.p != 2.0) {
    // Continuation in the exponent from the p = 2 warm start (or the given
    // init), stepping geometrically toward the target.
    std::vector<double> ladder;
    if (opts.init) {
      ladder.push_back(report.p);
    } else {
      const double ratio = 1.35;
      double p_cur = 2.0;
      while (p_cur != report.p) {
        p_cur = report.p > 2.0 ? std::min(p_cur * ratio, report.p)
                               : std::max(p_cur / ratio, report.p);
        ladder.push_back(p_cur);
      }
    }
    for (double p_stage : ladder) {
      const bool final_stage = p_stage == report.p;
      const double stage_tol = final_stage ? tol : std::max(tol, 1e-4);
      DescentResult d = descend(c, p_stage, std::move(x), stage_tol, opts.max_iter);
      x = std::move(d.x);
      iterations += d.iterations;
      converged = d.converged;
    }
  }

  // Canonical gauge: base vertex 0 lands in [0, 1).
  const double shift = std::floor(x[0]);
  for (double& v : x) v -= shift;

  report.potential = x;
  report.value = capacity_energy(c, x, report.p);
  const std::vector<double> grad = capacity_gradient(c, x, report.p);
  report.kkt_residual = norm2(grad) / (1.0 + std::abs(report.value));
  report.iterations = iterations;
  report.converged = converged;
  report.minimizer = CircleMap(n);
  for (VertexId v = 0; v < n; ++v) report.minimizer[v] = frac(x[v]);
  report.rho0 = Density(c.edges.size());
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    report.rho0[e] = std::abs(x[ed.v] - x[ed.u] + ed.w) / ed.ell;
  }
  return report;
}

Density minimal_upper_gradient(const ToroidalComplex& c, const CircleMap& f) {
  const std::vector<double> delta = edge_increments(c, f);
  Density rho(c.edges.size());
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    rho[e] = std::abs(delta[e]) / c.edges[e].ell;
  }
  return rho;
}

std::vector<double> potential_of(const ToroidalComplex& c, const CircleMap& f) {
  const LiftedMap g = lift(c, f, 1);
  std::vector<double> x(c.vertex_count());
  for (VertexId v = 0; v < c.vertex_count(); ++v) x[v] = g.at(v, 0);
  return x;
}

VariationalCheck variational_check(const ToroidalComplex& c,
                                   const CapacityReport& report, const Density& rho,
                                   double p, const std::vector<double>& map_potential,
                                   double tol) {
  if (map_potential.size() != c.vertices.size() || rho.size() != c.edges.size()) {
    throw InvalidArgumentError("variational_check: size mismatch");
  }
  if (!rho.is_valid()) {
    throw InvalidArgumentError("variational_check: density must be finite and >= 0");
  }
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    const double delta = map_potential[ed.v] - map_potential[ed.u] + ed.w;
    if (std::abs(delta) > rho[e] * ed.ell + 1e-12) {
      throw UpperGradientError("variational_check: rho is not an upper gradient on edge " +
                               std::to_string(e));
    }
  }
  VariationalCheck out;
  out.lhs = report.value;
  const double pe = clamp_exponent(p);
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    out.rhs += c.edges[e].mu * std::pow(report.rho0[e], pe - 1.0) * rho[e];
  }
  out.ok = out.lhs <= out.rhs + tol * (1.0 + std::abs(out.rhs));
  return out;
}

}  // namespace toromod
