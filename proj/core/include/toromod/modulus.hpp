#pragma once

#include <vector>

#include "toromod/complex.hpp"

namespace toromod {

/// One admissibility constraint: sum over the support of coeff_e * rho_e >= 1.
/// Coefficients are ell_e for path families and h_e for surface families.
struct FamilyMember {
  std::vector<EdgeId> support;  // sorted ascending
  std::vector<double> coeffs;   // parallel to support, all > 0
  double weight = 0.0;          // sum coeff_e * rho_e at the query density
  bool family_empty = false;    // the family has no members at all
};

/// Most-violated-member interface over a family of linear admissibility
/// constraints. Implementations must be safe for concurrent read-only
/// queries against the shared complex.
class ConstraintOracle {
 public:
  virtual ~ConstraintOracle() = default;

  /// A member minimizing sum coeff_e * rho_e, with that minimum in `weight`.
  /// An empty support (with family_empty false) signals an unsatisfiable
  /// member: the modulus is infinite.
  virtual FamilyMember most_violated(const Density& rho) const = 0;

  /// True when enumerate_all() is available (tiny instances only).
  virtual bool can_enumerate() const { return false; }
  virtual std::vector<FamilyMember> enumerate_all() const { return {}; }
};

enum class SolveStatus {
  kConverged,
  kNotConverged,
  kInfinite,  // family contains an unsatisfiable member
};

/// A generated constraint together with its dual weight.
struct ActiveMember {
  std::vector<EdgeId> support;
  std::vector<double> coeffs;
  double lambda = 0.0;
  double weight = 0.0;  // at the reported density
};

struct SolveReport {
  SolveStatus status = SolveStatus::kNotConverged;
  bool converged = false;
  double value = 0.0;  // sum mu_e rho_e^p; stays finite in every status
  Density density;
  std::vector<ActiveMember> active_members;
  double min_constraint = 0.0;  // min member weight seen at the final density
  int iterations = 0;           // oracle rounds
  double p = 2.0;               // effective exponent after clamping
  double tol = 1e-6;
  double stationarity_residual = 0.0;  // max_e |rho_e - dual KKT map|
  double comp_slack_residual = 0.0;    // max_j |lambda_j (weight_j - 1)|
};

struct SolveOptions {
  double tol = 1e-6;
  int max_iter = 10000;
};

/// Exponents outside this range are clamped before solving; 1/(p-1) blows up
/// conditioning as p -> 1.
inline constexpr double kMinExponent = 1.05;
inline constexpr double kMaxExponent = 20.0;
double clamp_exponent(double p);

/// Minimize sum mu_e rho_e^p over densities satisfying every family
/// constraint, by constraint generation with dual coordinate ascent on the
/// active members. A converged report satisfies feasibility within tol,
/// the KKT stationarity map exactly, and complementary slackness within tol;
/// its value lower-bounds the true modulus within (1-tol)^(-p).
SolveReport solve_modulus(const ToroidalComplex& c, const ConstraintOracle& oracle,
                          double p, const SolveOptions& opts = {});

/// Test oracle: solve the same convex program with every constraint present,
/// by projected gradient on the dual to tolerance 1e-9. Limited to 64
/// members and 64 edges.
double brute_force_modulus(const ToroidalComplex& c,
                           const std::vector<FamilyMember>& members, double p);

}  // namespace toromod
