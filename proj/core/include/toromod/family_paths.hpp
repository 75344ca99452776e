#pragma once

#include <memory>
#include <vector>

#include "toromod/covering.hpp"
#include "toromod/modulus.hpp"

namespace toromod {

/// A degree-1 winding cycle: an oriented closed walk with winding number 1
/// that lifts to a simple path across one period of the cover. Its
/// admissibility coefficients are ell_e on the support.
struct WindingCycle {
  std::vector<OrientedEdge> walk;
  std::vector<EdgeId> support;  // sorted ascending
  double weight = 0.0;          // sum rho_e * ell_e over the support
  int winding = 1;
};

/// Minimize sum rho_e * ell_e over winding-1 cycles: the minimum over
/// meridian-slice vertices v of the shortest (v, 0) -> (v, 1) path in the
/// one-period cover with edge weights rho_e * ell_e. Ties break toward the
/// smallest distance, then the smallest slice vertex.
WindingCycle winding_cycle_oracle(const ToroidalComplex& c, const Density& rho);

/// ConstraintOracle adapter over winding_cycle_oracle; reusable across
/// solver rounds and safe for concurrent queries.
class WindingCycleFamily : public ConstraintOracle {
 public:
  explicit WindingCycleFamily(const ToroidalComplex& c);
  FamilyMember most_violated(const Density& rho) const override;
  bool can_enumerate() const override { return true; }
  std::vector<FamilyMember> enumerate_all() const override;

 private:
  const ToroidalComplex* c_;
  std::shared_ptr<const PeriodicCover> cover_;
};

/// p-modulus of the winding-cycle family.
SolveReport path_modulus(const ToroidalComplex& c, double p,
                         const SolveOptions& opts = {});

/// Every distinct support of a simple one-period winding cycle, pruned to
/// the inclusion-minimal ones (supersets impose weaker constraints and do
/// not change the modulus). Tiny instances only; throws SizeLimitError.
std::vector<FamilyMember> enumerate_winding_cycles(const ToroidalComplex& c);

}  // namespace toromod
