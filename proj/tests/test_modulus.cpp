#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "toromod/family_paths.hpp"
#include "toromod/family_surfaces.hpp"
#include "toromod/modulus.hpp"

using namespace toromod;
using namespace toromod::testing;

namespace {

// Oracle stub whose family contains an unsatisfiable (empty) member.
class EmptyMemberOracle : public ConstraintOracle {
 public:
  FamilyMember most_violated(const Density&) const override { return {}; }
};

FamilyMember single_member(const ToroidalComplex& c, std::vector<EdgeId> support) {
  FamilyMember m;
  m.support = std::move(support);
  for (EdgeId e : m.support) m.coeffs.push_back(c.edges[e].ell);
  return m;
}

}  // namespace

TEST_CASE("winding-cycle modulus on rings matches the Lagrange closed form") {
  SolveOptions opts;
  opts.tol = 1e-8;
  const ToroidalComplex a = build_ring(3, 1.0, 1.0);
  const SolveReport ra = path_modulus(a, 2.0, opts);
  REQUIRE(ra.converged);
  CHECK(close_rel(ra.value, 1.0, 1e-8));
  for (double rho : ra.density.values) CHECK(close_rel(rho, 1.0, 1e-7));

  const ToroidalComplex b = build_ring(3, 2.0, 1.0);
  const SolveReport rb = path_modulus(b, 2.0, opts);
  REQUIRE(rb.converged);
  CHECK(close_rel(rb.value, 0.5, 1e-8));
}

TEST_CASE("an unsatisfiable member makes the modulus infinite") {
  const ToroidalComplex c = build_ring(3, 1.0, 1.0);
  const EmptyMemberOracle oracle;
  const SolveReport report = solve_modulus(c, oracle, 2.0);
  CHECK(report.status == SolveStatus::kInfinite);
  CHECK_FALSE(report.converged);
  CHECK(report.value == 0.0);  // the distinguished state, not a float infinity
}

TEST_CASE("brute force handles the documented examples") {
  const ToroidalComplex ring = build_ring(3, 1.0, 1.0);
  const FamilyMember full = single_member(ring, {0, 1, 2});

  SUBCASE("single member") {
    CHECK(close_rel(brute_force_modulus(ring, {full}, 2.0), 1.0, 1e-8));
  }
  SUBCASE("duplicate constraints are inert") {
    CHECK(close_rel(brute_force_modulus(ring, {full, full}, 2.0),
                    brute_force_modulus(ring, {full}, 2.0), 1e-8));
  }
  SUBCASE("modulus adds over edge-disjoint sub-families") {
    const ToroidalComplex r4 = build_ring(4, 1.0, 1.0);
    const FamilyMember m0 = single_member(r4, {0});
    const FamilyMember m1 = single_member(r4, {1});
    const double together = brute_force_modulus(r4, {m0, m1}, 2.0);
    const double split =
        brute_force_modulus(r4, {m0}, 2.0) + brute_force_modulus(r4, {m1}, 2.0);
    CHECK(close_rel(together, split, 1e-8));
  }
  SUBCASE("size limits") {
    std::vector<FamilyMember> too_many(65, full);
    CHECK_THROWS_AS(brute_force_modulus(ring, too_many, 2.0), SizeLimitError);
  }
  SUBCASE("empty member rejected") {
    CHECK_THROWS_AS(brute_force_modulus(ring, {FamilyMember{}}, 2.0),
                    InvalidArgumentError);
  }
}

TEST_CASE("enlarging the family weakly increases the modulus") {
  const ToroidalComplex tube = make_tube(3);
  const std::vector<FamilyMember> members = enumerate_winding_cycles(tube);
  REQUIRE(members.size() >= 2);
  double prev = 0.0;
  for (std::size_t count = 1; count <= members.size(); ++count) {
    const std::vector<FamilyMember> sub(members.begin(), members.begin() + count);
    const double value = brute_force_modulus(tube, sub, 2.0);
    CHECK(value >= prev - 1e-9);
    prev = value;
  }
}

TEST_CASE("modulus is homogeneous in the measure") {
  const ToroidalComplex ring = build_ring(4, 1.0, 2.0);
  SolveOptions opts;
  opts.tol = 1e-8;
  const double base = path_modulus(ring, 2.5, opts).value;
  for (double s : {0.5, 2.0}) {
    ToroidalComplex scaled = ring;
    for (Edge& e : scaled.edges) e.mu *= s;
    scaled.rebuild_adjacency();
    const double value = path_modulus(scaled, 2.5, opts).value;
    CHECK(close_rel(value, s * base, 1e-7));
  }
}

TEST_CASE("constraint generation agrees with brute force on tiny instances") {
  SolveOptions opts;
  opts.tol = 1e-8;
  for (const ToroidalComplex& c : {build_ring(3, 1.0, 1.0), make_tube(3)}) {
    for (double p : {1.5, 2.0, 4.0}) {
      const double solve_paths = path_modulus(c, p, opts).value;
      const double brute_paths = brute_force_modulus(c, enumerate_winding_cycles(c), p);
      CHECK(close_rel(solve_paths, brute_paths, 1e-6));

      const double p_star = p / (p - 1.0);
      const double solve_cuts = surface_modulus(c, p_star, opts).value;
      const double brute_cuts = brute_force_modulus(c, enumerate_minimal_cuts(c), p_star);
      CHECK(close_rel(solve_cuts, brute_cuts, 1e-6));
    }
  }
}

TEST_CASE("KKT residuals can be re-asserted from the report alone") {
  const ToroidalComplex tube = make_tube(3);
  SolveOptions opts;
  opts.tol = 1e-8;
  const SolveReport report = path_modulus(tube, 2.0, opts);
  REQUIRE(report.converged);
  CHECK(report.min_constraint >= 1.0 - opts.tol);
  CHECK(report.stationarity_residual <= opts.tol);
  CHECK(report.comp_slack_residual <= opts.tol);

  // stationarity recomputed from the active members
  std::vector<double> a(tube.edges.size(), 0.0);
  for (const ActiveMember& m : report.active_members) {
    CHECK(m.lambda >= 0.0);
    for (std::size_t t = 0; t < m.support.size(); ++t) {
      a[m.support[t]] += m.lambda * m.coeffs[t];
    }
    // complementary slackness from reported weights
    CHECK(std::abs(m.lambda * (m.weight - 1.0)) <= opts.tol);
  }
  for (EdgeId e = 0; e < tube.edge_count(); ++e) {
    const double want =
        a[e] > 0.0 ? std::pow(a[e] / (report.p * tube.edges[e].mu), 1.0 / (report.p - 1.0))
                   : 0.0;
    CHECK(close_abs(report.density[e], want, 1e-10));
  }
  // the reported energy matches the density
  double energy = 0.0;
  for (EdgeId e = 0; e < tube.edge_count(); ++e) {
    energy += tube.edges[e].mu * std::pow(report.density[e], report.p);
  }
  CHECK(close_rel(energy, report.value, 1e-12));
}

TEST_CASE("exponents are clamped to the supported range") {
  const ToroidalComplex ring = build_ring(3, 1.0, 1.0);
  CHECK(path_modulus(ring, 1.0).p == doctest::Approx(kMinExponent));
  CHECK(path_modulus(ring, 100.0).p == doctest::Approx(kMaxExponent));
  CHECK_THROWS_AS(path_modulus(ring, std::nan("")), InvalidArgumentError);
}
