#pragma once

#include <string>
#include <vector>

#include "toromod/capacity.hpp"
#include "toromod/family_paths.hpp"
#include "toromod/family_surfaces.hpp"

namespace toromod {

/// Builder parameters of one sweep geometry. `type` is "ring", "torus" or
/// "complex" (a file path); toruses may carry a k_theta refinement ladder.
struct GeometrySpec {
  std::string type = "ring";
  // ring
  int m = 8;
  double A = 1.0;
  // torus
  int k_theta = 16;
  int n_r = 3;
  int n_phi = 8;
  double R = 1.0;
  std::string warp = "flat";
  std::vector<int> k_theta_ladder;  // optional; expands into one row each
  // shared
  double L = 1.0;
  double scale = 1.0;  // metric scaling applied after building
  std::string path;    // for type == "complex"

  std::string id() const;
  ToroidalComplex build() const;
};

/// One duality experiment: capacity, path modulus and surface modulus at the
/// dual exponent, their product, and the per-cut variational bound taken at
/// a level cut of the capacity minimizer.
struct DualityRow {
  GeometrySpec geom;
  double q = 3.0;
  double p = 2.0;
  double p_star = 2.0;
  double cap = 0.0;
  double mod_paths = 0.0;
  double mod_surf = 0.0;
  double product = 0.0;    // cap^(1/p) * mod_surf^(1/p_star)
  double gap_ratio = 0.0;  // cap / mod_paths
  int cap_iters = 0;
  int path_iters = 0;
  int surf_iters = 0;
  bool cap_converged = false;
  bool path_converged = false;
  bool surf_converged = false;
  bool path_leq_cap = false;  // mod_paths <= cap + tol
  double percut_rhs = 0.0;    // variational bound at the minimizer's level cut
  bool percut_ok = false;
  bool failed = false;  // some stage threw; see error
  std::string error;
  // Payloads, filled when emit_fields is set.
  std::vector<double> cap_minimizer;
  std::vector<double> cap_rho0;
  std::vector<double> path_density;
  std::vector<double> surf_density;
};

struct DualityOptions {
  double tol = 1e-6;
  int max_iter = 10000;
  bool emit_fields = false;
  double level = 0.5;  // level of the minimizer cut for the per-cut bound
};

DualityRow run_duality(const ToroidalComplex& c, double p,
                       const DualityOptions& opts = {});

/// Empirical coarea ratio: the level-integrated cut weight of g against
/// sum_e g_e (|delta_e|/ell_e) mu_e, over n_levels uniformly spaced levels.
/// Returns +infinity when the right side vanishes while the left does not.
double coarea_check(const ToroidalComplex& c, const CircleMap& f, const Density& g,
                    int n_levels);

/// Empirical relative isoperimetric constant: the worst ratio of
/// min(mu(B cap U+), mu(B cap U-)) / mu(B) against r * H(S cap 2B) / mu(2B)
/// over deterministically sampled graph-metric balls near a level cut of f.
/// Balls missing the cut contribute nothing.
double isoperimetric_check(const ToroidalComplex& c, const CircleMap& f,
                           int sample_balls);

struct SweepConfig {
  std::vector<GeometrySpec> geometries;
  std::vector<double> p_values = {2.0};
  double tol = 1e-6;
  int max_iter = 10000;
  unsigned seed = 0;
  int jobs = 1;
  bool emit_fields = false;

  std::string to_json() const;  // canonical echo for report headers
  static SweepConfig from_json(const std::string& text);
};

/// Deterministic row set over geometries x ladder x p, computed with up to
/// `jobs` worker threads and merged in row order. Per-row failures land in
/// flags; the sweep never aborts on one row.
std::vector<DualityRow> sweep(const SweepConfig& config);

std::string rows_to_csv(const SweepConfig& config, const std::vector<DualityRow>& rows);
std::string rows_to_json(const SweepConfig& config, const std::vector<DualityRow>& rows);

}  // namespace toromod
