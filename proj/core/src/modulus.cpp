#include "toromod/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "toromod/log.hpp"

namespace toromod {

namespace {

struct SupportHash {
  std::size_t operator()(const std::vector<EdgeId>& s) const {
    std::size_t h = 1469598103934665603ull;
    for (EdgeId e : s) {
      h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Shared state of the dual ascent: a_e = sum_j lambda_j c_{j,e} and the
// induced primal density rho_e = (a_e / (p mu_e))^(1/(p-1)).
struct DualState {
  const ToroidalComplex* c;
  double p;
  double s;  // 1/(p-1)
  std::vector<double> a;
  std::vector<double> rho;

  explicit DualState(const ToroidalComplex& complex, double exponent)
      : c(&complex),
        p(exponent),
        s(1.0 / (exponent - 1.0)),
        a(complex.edges.size(), 0.0),
        rho(complex.edges.size(), 0.0) {}

  double rho_of(double a_e, EdgeId e) const {
    if (a_e <= 0.0) return 0.0;
    return std::pow(a_e / (p * c->edges[e].mu), s);
  }

  void bump(const ActiveMember& m, double dlambda) {
    for (std::size_t t = 0; t < m.support.size(); ++t) {
      const EdgeId e = m.support[t];
      a[e] = std::max(0.0, a[e] + dlambda * m.coeffs[t]);
      rho[e] = rho_of(a[e], e);
    }
  }

  double member_weight(const ActiveMember& m) const {
    double w = 0.0;
    for (std::size_t t = 0; t < m.support.size(); ++t) {
      w += m.coeffs[t] * rho[m.support[t]];
    }
    return w;
  }

  // Member weight as a function of this member's own multiplier.
  double weight_at(const ActiveMember& m, double lambda_old, double lambda_new) const {
    double w = 0.0;
    for (std::size_t t = 0; t < m.support.size(); ++t) {
      const EdgeId e = m.support[t];
      const double base = a[e] - lambda_old * m.coeffs[t];
      w += m.coeffs[t] * rho_of(std::max(0.0, base + lambda_new * m.coeffs[t]), e);
    }
    return w;
  }

  double energy() const {
    double v = 0.0;
    for (EdgeId e = 0; e < c->edge_count(); ++e) {
      v += c->edges[e].mu * std::pow(rho[e], p);
    }
    return v;
  }
};

// Exact 1-D complementarity solve for one member: lambda >= 0 with the
// constraint tight, or lambda = 0 when it is already satisfied.
void ascend_member(DualState& state, ActiveMember& m) {
  const double w0 = state.weight_at(m, m.lambda, 0.0);
  if (w0 >= 1.0) {
    state.bump(m, -m.lambda);
    m.lambda = 0.0;
    return;
  }
  double lo = 0.0;
  double hi = std::max(m.lambda, 1.0);
  for (int it = 0; it < 400 && state.weight_at(m, m.lambda, hi) < 1.0; ++it) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (state.weight_at(m, m.lambda, mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * (1.0 + hi)) break;
  }
  const double next = 0.5 * (lo + hi);
  state.bump(m, next - m.lambda);
  m.lambda = next;
}

// Sweep the active set until every member is satisfied within inner_tol.
void inner_solve(DualState& state, std::vector<ActiveMember>& members,
                 double inner_tol, int max_sweeps) {
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double worst = 0.0;
    for (ActiveMember& m : members) {
      ascend_member(state, m);
    }
    for (const ActiveMember& m : members) {
      worst = std::max(worst, 1.0 - state.member_weight(m));
    }
    if (worst <= inner_tol) return;
  }
}

void fill_report_from_state(SolveReport& report, const DualState& state,
                            std::vector<ActiveMember>& members) {
  report.density.values = state.rho;
  report.value = state.energy();
  double comp = 0.0;
  double stat = 0.0;
  for (ActiveMember& m : members) {
    m.weight = state.member_weight(m);
    comp = std::max(comp, std::abs(m.lambda * (m.weight - 1.0)));
  }
  for (EdgeId e = 0; e < state.c->edge_count(); ++e) {
    stat = std::max(stat, std::abs(state.rho[e] - state.rho_of(state.a[e], e)));
  }
  report.active_members = members;
  report.comp_slack_residual = comp;
  report.stationarity_residual = stat;
}

}  // namespace

double clamp_exponent(double p) {
  if (!std::isfinite(p)) throw InvalidArgumentError("exponent p must be finite");
  return std::clamp(p, kMinExponent, kMaxExponent);
}

SolveReport solve_modulus(const ToroidalComplex& c, const ConstraintOracle& oracle,
                          double p, const SolveOptions& opts) {
  SolveReport report;
  report.p = clamp_exponent(p);
  report.tol = opts.tol;

  DualState state(c, report.p);
  std::vector<ActiveMember> members;
  std::unordered_set<std::vector<EdgeId>, SupportHash> seen;
  const double inner_tol = opts.tol * 0.1;
  int duplicate_rounds = 0;

  for (int round = 0; round < std::max(1, opts.max_iter); ++round) {
    report.iterations = round + 1;
    Density rho_query;
    rho_query.values = state.rho;
    const FamilyMember violated = oracle.most_violated(rho_query);

    if (violated.family_empty) {
      // No constraints: the zero density is optimal.
      report.status = members.empty() ? SolveStatus::kConverged : SolveStatus::kNotConverged;
      report.converged = members.empty();
      report.min_constraint = std::numeric_limits<double>::max();
      fill_report_from_state(report, state, members);
      return report;
    }
    if (violated.support.empty()) {
      report.status = SolveStatus::kInfinite;
      report.converged = false;
      fill_report_from_state(report, state, members);
      report.min_constraint = 0.0;
      return report;
    }
    if (log_level() == LogLevel::kDebug) {
      TOROMOD_LOG_DEBUG("solve_modulus round " + std::to_string(round) +
                        ": members=" + std::to_string(members.size()) +
                        " min_weight=" + std::to_string(violated.weight));
    }
    if (violated.weight >= 1.0 - opts.tol) {
      report.status = SolveStatus::kConverged;
      report.converged = true;
      fill_report_from_state(report, state, members);
      report.min_constraint = violated.weight;
      for (const ActiveMember& m : members) {
        report.min_constraint = std::min(report.min_constraint, m.weight);
      }
      return report;
    }

    if (seen.count(violated.support)) {
      // The member is already active but its constraint is still violated:
      // tighten the inner solve before giving up.
      if (++duplicate_rounds > 50) break;
      inner_solve(state, members, inner_tol * 0.01, 200 + 20 * static_cast<int>(members.size()));
      continue;
    }
    seen.insert(violated.support);
    ActiveMember m;
    m.support = violated.support;
    m.coeffs = violated.coeffs;
    members.push_back(std::move(m));
    inner_solve(state, members, inner_tol, 50 + 10 * static_cast<int>(members.size()));
  }

  report.status = SolveStatus::kNotConverged;
  report.converged = false;
  fill_report_from_state(report, state, members);
  report.min_constraint = std::numeric_limits<double>::max();
  for (const ActiveMember& m : members) {
    report.min_constraint = std::min(report.min_constraint, m.weight);
  }
  return report;
}

double brute_force_modulus(const ToroidalComplex& c,
                           const std::vector<FamilyMember>& members, double p) {
  if (members.size() > 64) throw SizeLimitError("brute_force_modulus: more than 64 members");
  if (c.edges.size() > 64) throw SizeLimitError("brute_force_modulus: more than 64 edges");
  p = clamp_exponent(p);
  for (const FamilyMember& m : members) {
    if (m.support.empty()) {
      throw InvalidArgumentError("brute_force_modulus: member with empty support");
    }
  }
  if (members.empty()) return 0.0;

  const double s = 1.0 / (p - 1.0);
  const std::size_t nm = members.size();

  auto rho_from = [&](const std::vector<double>& lambda, std::vector<double>& rho) {
    rho.assign(c.edges.size(), 0.0);
    for (std::size_t j = 0; j < nm; ++j) {
      for (std::size_t t = 0; t < members[j].support.size(); ++t) {
        rho[members[j].support[t]] += lambda[j] * members[j].coeffs[t];
      }
    }
    for (EdgeId e = 0; e < c.edge_count(); ++e) {
      rho[e] = rho[e] > 0.0 ? std::pow(rho[e] / (p * c.edges[e].mu), s) : 0.0;
    }
  };
  auto weights_from = [&](const std::vector<double>& rho, std::vector<double>& w) {
    w.assign(nm, 0.0);
    for (std::size_t j = 0; j < nm; ++j) {
      for (std::size_t t = 0; t < members[j].support.size(); ++t) {
        w[j] += members[j].coeffs[t] * rho[members[j].support[t]];
      }
    }
  };

  // Projected gradient ascent with per-coordinate adaptive steps; a single
  // joint step crawls when 1/(p-1) < 1 makes the dual map stiff near zero.
  std::vector<double> lambda(nm, 1.0), rho, w;
  std::vector<double> eta(nm, 0.1), prev_grad(nm, 0.0);
  rho_from(lambda, rho);
  const int max_iter = 500000;
  for (int it = 0; it < max_iter; ++it) {
    weights_from(rho, w);
    double worst = 0.0;
    double comp = 0.0;
    double proj_grad = 0.0;
    for (std::size_t j = 0; j < nm; ++j) {
      double grad = 1.0 - w[j];
      if (lambda[j] <= 0.0 && grad < 0.0) grad = 0.0;
      worst = std::max(worst, 1.0 - w[j]);
      comp = std::max(comp, std::abs(lambda[j] * (w[j] - 1.0)));
      proj_grad = std::max(proj_grad, std::abs(grad));
    }
    if (worst <= 1e-9 && comp <= 1e-9 && proj_grad <= 1e-10) break;

    for (std::size_t j = 0; j < nm; ++j) {
      double grad = 1.0 - w[j];
      if (lambda[j] <= 0.0 && grad < 0.0) {
        prev_grad[j] = 0.0;
        continue;
      }
      if (grad * prev_grad[j] > 0.0) {
        eta[j] = std::min(eta[j] * 1.2, 1e3);
      } else if (grad * prev_grad[j] < 0.0) {
        eta[j] = std::max(eta[j] * 0.5, 1e-18);
      }
      const double step = grad > 0.0 ? eta[j] : (grad < 0.0 ? -eta[j] : 0.0);
      lambda[j] = std::max(0.0, lambda[j] + step);
      prev_grad[j] = grad;
    }
    rho_from(lambda, rho);
  }

  // Rescale onto the exact feasible set before reporting.
  weights_from(rho, w);
  double min_w = std::numeric_limits<double>::max();
  for (double wj : w) min_w = std::min(min_w, wj);
  double value = 0.0;
  const double scale = (min_w > 0.0 && min_w < 1.0) ? 1.0 / min_w : 1.0;
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    value += c.edges[e].mu * std::pow(scale * rho[e], p);
  }
  return value;
}

}  // namespace toromod
