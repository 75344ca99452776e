#pragma once

#include <memory>
#include <vector>

#include "toromod/covering.hpp"
#include "toromod/modulus.hpp"

namespace toromod {

/// A separating (meridian-like) surface represented as an edge cut: every
/// winding-1 cycle meets it; equivalently, removing it from the one-period
/// cover disconnects M_0 from M_1. Coefficients are h_e on the support.
struct SeparatingCut {
  std::vector<EdgeId> edges;  // sorted ascending
  double h_weight = 0.0;      // sum of h_e over the cut
};

/// True iff removing `cut` from the one-period cover disconnects M_0 from M_1.
bool is_separating(const ToroidalComplex& c, const std::vector<EdgeId>& cut);

/// Minimize sum g_e * h_e over separating cuts: a minimum-capacity cut
/// between M_0 and M_1 in the one-period cover with capacities g_e * h_e,
/// tie-broken by the canonical source-side-closure cut. Returns the cut and
/// its weight under g.
std::pair<SeparatingCut, double> winding_cut_oracle(const ToroidalComplex& c,
                                                    const Density& g);

/// ConstraintOracle adapter over winding_cut_oracle.
class WindingCutFamily : public ConstraintOracle {
 public:
  explicit WindingCutFamily(const ToroidalComplex& c);
  FamilyMember most_violated(const Density& g) const override;
  bool can_enumerate() const override { return true; }
  std::vector<FamilyMember> enumerate_all() const override;

 private:
  const ToroidalComplex* c_;
  std::shared_ptr<const PeriodicCover> cover_;
};

/// p*-modulus of the separating-cut family.
SolveReport surface_modulus(const ToroidalComplex& c, double p_star,
                            const SolveOptions& opts = {});

/// Level cut of a degree-1 edge-fine map: the edges whose increment arc
/// crosses t. If t collides with a vertex value it is shifted by 1e-9 until
/// clear. The result is verified to separate.
SeparatingCut level_cut(const ToroidalComplex& c, const CircleMap& f, double t);

/// Crossing edges of a level without the separation verification; the level
/// is perturbed off vertex values the same way as in level_cut.
std::vector<EdgeId> level_crossing_edges(const ToroidalComplex& c, const CircleMap& f,
                                         double t);

/// Output of the cut -> degree-1 map construction. The potential carries
/// unit holonomy (x_v - x_u + w_e are its increments), which certifies
/// degree 1 even when psi is not edge-fine; rho_psi dominates the
/// increments edgewise and vanishes outside the eps-neighborhood of the cut.
struct SurfaceMapResult {
  CircleMap psi;
  Density rho_psi;
  std::vector<double> potential;      // one value per base vertex, in [0, 1]
  std::vector<EdgeId> neighborhood;   // the eps-neighborhood, sorted
  double crossing_distance = 0.0;     // rho_psi == 1/crossing_distance on it
  bool edge_fine = false;             // all |increments| < 1/2
};

/// Build a degree-1 circle map whose minimal upper gradient is supported in
/// the eps-neighborhood of the cut: distance-to-the-negative-side potential
/// under the density (1/D) * chi_N, clamped at one period. Throws
/// NotSeparatingError / EpsTooLargeError.
SurfaceMapResult surface_to_degree_one_map(const ToroidalComplex& c,
                                           const std::vector<EdgeId>& cut,
                                           double eps);

/// All inclusion-minimal separating cuts, found over vertex bipartitions of
/// the one-period cover. Tiny instances only; throws SizeLimitError.
std::vector<FamilyMember> enumerate_minimal_cuts(const ToroidalComplex& c);

}  // namespace toromod
