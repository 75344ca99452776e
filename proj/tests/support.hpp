#pragma once

// Shared helpers for the toromod test suites.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "toromod/capacity.hpp"
#include "toromod/complex.hpp"
#include "toromod/covering.hpp"

namespace toromod::testing {

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

inline bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

/// Two parallel rings of m edges joined by rungs; both rails cross the
/// meridian at the same interface so the quad faces keep the cocycle exact.
/// Small enough for full family enumeration.
inline ToroidalComplex make_tube(int m = 3, double L = 1.0) {
  ToroidalComplex c;
  c.q = 3.0;
  c.vertices.assign(2 * m, Vertex{0.0});
  const double ell_rail = L / m;
  auto add_edge = [&](VertexId u, VertexId v, double ell, double mu, int w) {
    Edge e;
    e.u = u;
    e.v = v;
    e.ell = ell;
    e.mu = mu;
    e.w = w;
    c.edges.push_back(e);
  };
  // rail A: vertices 0..m-1, edges 0..m-1
  for (int i = 0; i < m; ++i) {
    add_edge(i, (i + 1) % m, ell_rail, 0.2 * L / m, i == m - 1 ? 1 : 0);
  }
  // rail B: vertices m..2m-1, edges m..2m-1
  for (int i = 0; i < m; ++i) {
    add_edge(m + i, m + (i + 1) % m, ell_rail, 0.15 * L / m, i == m - 1 ? 1 : 0);
  }
  // rungs: edges 2m..3m-1
  for (int i = 0; i < m; ++i) {
    add_edge(i, m + i, 0.4 * L, 0.05 * L, 0);
  }
  for (int i = 0; i < m; ++i) {
    Face quad;
    quad.loop = {{i, +1},                    // a_i -> a_{i+1}
                 {2 * m + (i + 1) % m, +1},  // a_{i+1} -> b_{i+1}
                 {m + i, -1},                // b_{i+1} -> b_i
                 {2 * m + i, -1}};           // b_i -> a_i
    c.faces.push_back(std::move(quad));
  }
  c.rebuild_adjacency();
  validate_or_throw(c);
  return c;
}

/// Random edge-fine degree-1 circle map: noise on top of a potential that
/// climbs evenly across the period (the p = 2 minimizer), shrunk until all
/// increments stay clear of +-1/2.
inline CircleMap random_edge_fine_map(const ToroidalComplex& c, std::mt19937_64& rng,
                                      double amplitude = 0.3) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const std::vector<double> base = solve_capacity(c, 2.0).potential;
  const int n = c.vertex_count();
  std::vector<double> x(n);
  for (int attempt = 0;; ++attempt) {
    for (int v = 0; v < n; ++v) x[v] = base[v] + amplitude * uni(rng);
    double worst = 0.0;
    for (const Edge& e : c.edges) {
      worst = std::max(worst, std::abs(x[e.v] - x[e.u] + e.w));
    }
    if (worst < 0.45) break;
    amplitude *= 0.5;
    if (attempt > 100) throw Error("random_edge_fine_map: no edge-fine perturbation");
  }
  CircleMap f(n);
  for (VertexId v = 0; v < n; ++v) {
    double r = x[v] - std::floor(x[v]);
    if (r >= 1.0) r = 0.0;
    f[v] = r;
  }
  return f;
}

/// Random degree-1 potential near a given one (used for admissible
/// competitors in variational tests).
inline std::vector<double> perturb_potential(const std::vector<double>& x,
                                             std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> out = x;
  for (double& v : out) v += amplitude * uni(rng);
  return out;
}

/// Composite Simpson rule on [a, b].
template <typename F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Capacity of a ring by grid search over the free increments (the last one
/// is pinned by the unit holonomy). Independent of the solver path.
inline double ring_capacity_grid(const ToroidalComplex& ring, double p, int steps = 200) {
  const int m = ring.edge_count();
  // Symmetric exact answer has all increments equal; scan a 2-D slice that
  // contains it plus asymmetric competitors (enough for m <= 4 cross-checks).
  double best = std::numeric_limits<double>::infinity();
  auto energy = [&](const std::vector<double>& delta) {
    double v = 0.0;
    for (int i = 0; i < m; ++i) {
      v += ring.edges[i].mu * std::pow(std::abs(delta[i]) / ring.edges[i].ell, p);
    }
    return v;
  };
  std::vector<double> delta(m, 0.0);
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; b <= steps; ++b) {
      const double d0 = -0.5 + 2.0 * a / steps;
      const double d1 = -0.5 + 2.0 * b / steps;
      delta.assign(m, (1.0 - d0 - d1) / (m - 2));
      delta[0] = d0;
      delta[1] = d1;
      best = std::min(best, energy(delta));
    }
  }
  return best;
}

}  // namespace toromod::testing
