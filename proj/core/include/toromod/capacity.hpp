#pragma once

#include <optional>
#include <vector>

#include "toromod/covering.hpp"
#include "toromod/modulus.hpp"

namespace toromod {

struct CapacityOptions {
  double tol = 0.0;  // 0 = default: 1e-8 for p == 2, 1e-6 otherwise
  int max_iter = 10000;
  std::optional<std::vector<double>> init;  // starting potential
};

struct CapacityReport {
  double value = 0.0;
  CircleMap minimizer;            // projection of the optimal potential
  std::vector<double> potential;  // real vertex potential with unit holonomy
  Density rho0;                   // minimal upper gradient |delta|/ell
  double kkt_residual = 0.0;      // grad norm / (1 + |E|)
  int iterations = 0;
  bool converged = false;
  double p = 2.0;  // effective exponent after clamping
};

/// Energy of a vertex potential: sum_e mu_e (|x_v - x_u + w_e| / ell_e)^p.
/// The +w_e term realizes the unit deck shift, so every potential represents
/// a degree-1 circle map.
double capacity_energy(const ToroidalComplex& c, const std::vector<double>& x, double p);

std::vector<double> capacity_gradient(const ToroidalComplex& c,
                                      const std::vector<double>& x, double p);

/// Degree-1 p-capacity: minimize the energy over vertex potentials. p = 2 is
/// solved as a weighted graph Laplacian system with a cocycle source term by
/// preconditioned conjugate gradients; other exponents run backtracking
/// descent with continuation from the p = 2 solution.
CapacityReport solve_capacity(const ToroidalComplex& c, double p,
                              const CapacityOptions& opts = {});

/// Smallest density satisfying the edgewise upper-gradient inequality for f:
/// rho_e = |delta_e| / ell_e.
Density minimal_upper_gradient(const ToroidalComplex& c, const CircleMap& f);

/// Potential (sheet-0 lift values) of an edge-fine degree-1 circle map.
std::vector<double> potential_of(const ToroidalComplex& c, const CircleMap& f);

struct VariationalCheck {
  double lhs = 0.0;  // capacity value
  double rhs = 0.0;  // sum mu_e rho0_e^(p-1) rho_e
  bool ok = false;   // lhs <= rhs + tol
};

/// The minimizer's variational inequality against a competing density rho
/// that dominates the increments of the supplied degree-1 potential
/// (checked edgewise; throws UpperGradientError). Equality holds at
/// rho = rho0 up to solver tolerance.
VariationalCheck variational_check(const ToroidalComplex& c,
                                   const CapacityReport& report, const Density& rho,
                                   double p, const std::vector<double>& map_potential,
                                   double tol = 1e-8);

}  // namespace toromod
