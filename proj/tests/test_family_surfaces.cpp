#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "toromod/capacity.hpp"
#include "toromod/family_surfaces.hpp"

using namespace toromod;
using namespace toromod::testing;

namespace {

// Longitudinal edges of one slice interface of a product torus, identified
// by their length (the only edges of length L/k_theta).
std::vector<EdgeId> interface_cut(const ToroidalComplex& c, int k_theta, double L,
                                  int which) {
  const double ell = L / k_theta;
  std::vector<EdgeId> interfaces;
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    if (std::abs(c.edges[e].ell - ell) < 1e-12) interfaces.push_back(e);
  }
  // Longitudinal edges come first in builder order, interface-major.
  const int per_interface = static_cast<int>(interfaces.size()) / k_theta;
  std::vector<EdgeId> out;
  for (int t = 0; t < per_interface; ++t) {
    out.push_back(interfaces[which * per_interface + t]);
  }
  return out;
}

}  // namespace

TEST_CASE("ring cuts are single edges with canonical tie-break") {
  const ToroidalComplex c = build_ring(3, 1.0, 1.0);
  const Density g(c.edges.size(), 1.0);
  const auto [cut, weight] = winding_cut_oracle(c, g);
  CHECK(cut.edges == std::vector<EdgeId>{0});  // source-side closure
  CHECK(close_rel(weight, 1.0, 1e-12));        // h = A = 1
  CHECK(close_rel(cut.h_weight, 1.0, 1e-12));
}

TEST_CASE("flat torus min cut is one meridian slice") {
  const ToroidalComplex c = build_solid_torus(8, 3, 8, 1.0, 1.0);
  const Density g(c.edges.size(), 1.0);
  const auto [cut, weight] = winding_cut_oracle(c, g);
  CHECK(close_rel(weight, (1.0 - kDiskMeasureShare) * M_PI, 1e-9));
  CHECK(close_rel(weight, M_PI, 0.05));  // within mesh quantization of A
  // all cut edges are longitudinal and live on a single interface
  std::set<VertexId> tails;
  for (EdgeId e : cut.edges) {
    CHECK(c.edges[e].ell == doctest::Approx(1.0 / 8));
    tails.insert(c.edges[e].u / (1 + 3 * 8));  // slice index of the tail
  }
  CHECK(tails.size() == 1);
  CHECK(cut.edges.size() == 1 + 3 * 8);
}

TEST_CASE("expensive slices are avoided by the min cut") {
  const ToroidalComplex c = build_solid_torus(8, 2, 6, 1.0, 1.0);
  Density g(c.edges.size(), 1.0);
  const std::vector<EdgeId> slice0 = interface_cut(c, 8, 1.0, 0);
  for (EdgeId e : slice0) g[e] = 100.0;
  const auto [cut, weight] = winding_cut_oracle(c, g);
  for (EdgeId e : cut.edges) {
    CHECK(std::find(slice0.begin(), slice0.end(), e) == slice0.end());
  }
  CHECK(close_rel(weight, (1.0 - kDiskMeasureShare) * M_PI, 1e-9));
}

TEST_CASE("ring surface modulus matches L A^(1-p*)") {
  SolveOptions opts;
  opts.tol = 1e-8;
  for (double p : {1.5, 2.0, 3.0}) {
    const double p_star = p / (p - 1.0);
    const ToroidalComplex c = build_ring(5, 2.0, 3.0);
    const SolveReport report = surface_modulus(c, p_star, opts);
    REQUIRE(report.converged);
    CHECK(close_rel(report.value, 2.0 * std::pow(3.0, 1.0 - p_star), 1e-7));
  }
}

TEST_CASE("flat torus surface modulus approaches L / A") {
  const ToroidalComplex c = build_solid_torus(16, 3, 8, 1.0, 1.0);
  SolveOptions opts;
  opts.tol = 1e-8;
  const SolveReport report = surface_modulus(c, 2.0, opts);
  REQUIRE(report.converged);
  CHECK(close_rel(report.value, 1.0 / M_PI, 0.05));
  CHECK(close_rel(report.value, 1.0 / ((1.0 - kDiskMeasureShare) * M_PI), 1e-6));
}

TEST_CASE("surface modulus scales like s^(q - p*(q-1))") {
  const double s = 2.0;
  SolveOptions opts;
  opts.tol = 1e-8;
  for (double p : {1.5, 2.0, 3.0}) {
    const double p_star = p / (p - 1.0);
    const ToroidalComplex ring = build_ring(4, 1.0, 2.0);
    const ToroidalComplex scaled = scale_metric(ring, s);
    const double base = surface_modulus(ring, p_star, opts).value;
    const double after = surface_modulus(scaled, p_star, opts).value;
    CHECK(close_rel(after, std::pow(s, ring.q - p_star * (ring.q - 1.0)) * base, 1e-7));
  }
}

TEST_CASE("level cuts of the uniform ring map") {
  const ToroidalComplex c = build_ring(3, 1.0, 1.0);
  CircleMap f(3);
  f[0] = 0.0;
  f[1] = 1.0 / 3;
  f[2] = 2.0 / 3;
  const SeparatingCut cut = level_cut(c, f, 1.0 / 6);
  CHECK(cut.edges == std::vector<EdgeId>{0});
  CHECK(close_rel(cut.h_weight, 1.0, 1e-12));
  CHECK_THROWS_AS(level_cut(c, CircleMap(3, 0.2), 0.5), InvalidArgumentError);
}

TEST_CASE("level cuts of random degree-1 maps always separate") {
  const ToroidalComplex c = build_solid_torus(6, 2, 5, 1.0, 1.0);
  std::mt19937_64 rng(5);
  const CapacityReport cap = solve_capacity(c, 2.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 16; ++trial) {
    const SeparatingCut cut = level_cut(c, cap.minimizer, uni(rng));
    CHECK(is_separating(c, cut.edges));  // level_cut verified it already
    CHECK(close_rel(cut.h_weight, M_PI, 0.10));
  }
}

TEST_CASE("converged surface density is admissible on unseen level cuts") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  SolveOptions opts;
  opts.tol = 1e-6;
  for (const ToroidalComplex& c :
       {build_solid_torus(8, 2, 6, 1.0, 1.0),
        build_solid_torus(8, 2, 6, 1.0, 1.0, make_warp("sin:0.5"))}) {
    const SolveReport surf = surface_modulus(c, 2.0, opts);
    REQUIRE(surf.converged);
    const CapacityReport cap = solve_capacity(c, 2.0);
    for (int trial = 0; trial < 16; ++trial) {
      const SeparatingCut cut = level_cut(c, cap.minimizer, uni(rng));
      double weight = 0.0;
      for (EdgeId e : cut.edges) weight += surf.density[e] * c.h(e);
      CHECK(weight >= 1.0 - opts.tol);
    }
  }
}

TEST_CASE("cut-to-map construction on the ring single-edge cut") {
  const ToroidalComplex c = build_ring(3, 1.0, 1.0);
  const SurfaceMapResult built = surface_to_degree_one_map(c, {0}, 1.0 / 3);
  // density concentrated on the cut edge at 1/D = m/L
  CHECK(built.neighborhood == std::vector<EdgeId>{0});
  CHECK(close_rel(built.crossing_distance, 1.0 / 3, 1e-12));
  CHECK(close_rel(built.rho_psi[0], 3.0, 1e-12));
  CHECK(built.rho_psi[1] == 0.0);
  CHECK(built.rho_psi[2] == 0.0);
  // increments climb the whole period on the cut edge
  std::vector<double> deltas;
  for (EdgeId e = 0; e < 3; ++e) {
    const Edge& ed = c.edges[e];
    deltas.push_back(built.potential[ed.v] - built.potential[ed.u] + ed.w);
  }
  CHECK(close_abs(deltas[0], 1.0, 1e-12));
  CHECK(close_abs(deltas[1], 0.0, 1e-12));
  CHECK(close_abs(deltas[2], 0.0, 1e-12));
  CHECK_FALSE(built.edge_fine);
  // upper-gradient inequality edgewise
  for (EdgeId e = 0; e < 3; ++e) {
    CHECK(std::abs(deltas[e]) <= built.rho_psi[e] * c.edges[e].ell + 1e-12);
  }
  // unit holonomy certifies degree 1
  double cycle_sum = 0.0;
  for (double d : deltas) cycle_sum += d;
  CHECK(std::lround(cycle_sum) == 1);
}

TEST_CASE("cut-to-map construction is edge-fine away from the meridian") {
  const int k = 16;
  const ToroidalComplex c = build_solid_torus(k, 2, 6, 1.0, 1.0);
  const std::vector<EdgeId> cut = interface_cut(c, k, 1.0, 4);
  REQUIRE(is_separating(c, cut));
  const SurfaceMapResult built = surface_to_degree_one_map(c, cut, 2.5 / k);
  CHECK(built.edge_fine);
  CHECK(degree(c, built.psi) == 1);
  // support containment in the neighborhood
  std::set<EdgeId> nbhd(built.neighborhood.begin(), built.neighborhood.end());
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    const double delta = built.potential[ed.v] - built.potential[ed.u] + ed.w;
    if (built.rho_psi[e] > 0.0) CHECK(nbhd.count(e) == 1);
    if (std::abs(delta) > 1e-12) CHECK(built.rho_psi[e] > 0.0);
  }
  // the climb spreads over three interfaces
  CHECK(close_rel(built.crossing_distance, 3.0 / k, 1e-12));
}

TEST_CASE("cut-to-map rejects bad inputs") {
  const ToroidalComplex c = build_solid_torus(8, 2, 6, 1.0, 1.0);
  std::vector<EdgeId> cut = interface_cut(c, 8, 1.0, 2);
  SUBCASE("removing one edge opens a winding channel") {
    cut.pop_back();
    CHECK_THROWS_AS(surface_to_degree_one_map(c, cut, 0.3), NotSeparatingError);
  }
  SUBCASE("a neighborhood covering the period wraps") {
    CHECK_THROWS_AS(surface_to_degree_one_map(c, cut, 10.0), EpsTooLargeError);
  }
  SUBCASE("eps must be positive") {
    CHECK_THROWS_AS(surface_to_degree_one_map(c, cut, 0.0), InvalidArgumentError);
  }
}

TEST_CASE("minimal cut enumeration on the ring and the tube") {
  const ToroidalComplex ring = build_ring(4, 1.0, 1.0);
  const std::vector<FamilyMember> ring_cuts = enumerate_minimal_cuts(ring);
  CHECK(ring_cuts.size() == 4);
  for (const FamilyMember& m : ring_cuts) CHECK(m.support.size() == 1);

  const ToroidalComplex tube = make_tube(3);
  const std::vector<FamilyMember> tube_cuts = enumerate_minimal_cuts(tube);
  for (const FamilyMember& m : tube_cuts) {
    CHECK(is_separating(tube, m.support));
    // minimality: dropping any edge opens a winding channel
    for (std::size_t skip = 0; skip < m.support.size(); ++skip) {
      std::vector<EdgeId> smaller;
      for (std::size_t t = 0; t < m.support.size(); ++t) {
        if (t != skip) smaller.push_back(m.support[t]);
      }
      CHECK_FALSE(is_separating(tube, smaller));
    }
  }
  // the two crossing edges form one minimal cut
  bool found_crossing_pair = false;
  for (const FamilyMember& m : tube_cuts) {
    found_crossing_pair = found_crossing_pair || m.support == std::vector<EdgeId>{2, 5};
  }
  CHECK(found_crossing_pair);
}
