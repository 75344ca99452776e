#include "toromod/family_surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <set>

namespace toromod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double frac(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

// Dinic max-flow with deterministic arc order.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

  int add_edge(int u, int v, double cap_forward, double cap_backward) {
    arcs_.push_back({v, head_[u], cap_forward});
    head_[u] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, head_[v], cap_backward});
    head_[v] = static_cast<int>(arcs_.size()) - 1;
    return static_cast<int>(arcs_.size()) - 2;
  }

  double run(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      it_ = head_;
      double pushed;
      while ((pushed = dfs(s, t, kInf)) > 0.0) flow += pushed;
    }
    return flow;
  }

  // Vertices reachable from s in the residual graph (the source-side closure).
  std::vector<char> min_cut_side(int s) const {
    std::vector<char> side(head_.size(), 0);
    std::deque<int> queue{s};
    side[s] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int a = head_[u]; a != -1; a = arcs_[a].next) {
        if (arcs_[a].cap > kResidualEps && !side[arcs_[a].to]) {
          side[arcs_[a].to] = 1;
          queue.push_back(arcs_[a].to);
        }
      }
    }
    return side;
  }

 private:
  struct Arc {
    int to;
    int next;
    double cap;
  };
  static constexpr double kResidualEps = 1e-15;

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<int> queue{s};
    level_[s] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int a = head_[u]; a != -1; a = arcs_[a].next) {
        if (arcs_[a].cap > kResidualEps && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[u] + 1;
          queue.push_back(arcs_[a].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double limit) {
    if (u == t) return limit;
    for (int& a = it_[u]; a != -1; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.cap > kResidualEps && level_[arc.to] == level_[u] + 1) {
        const double pushed = dfs(arc.to, t, std::min(limit, arc.cap));
        if (pushed > 0.0) {
          arc.cap -= pushed;
          arcs_[a ^ 1].cap += pushed;
          return pushed;
        }
      }
    }
    level_[u] = -2;
    return 0.0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

bool separates_in_cover(const PeriodicCover& cover, const std::vector<char>& cut_mask) {
  std::vector<char> seen(cover.vertices.size(), 0);
  std::deque<int> queue;
  for (int v : cover.m0) {
    seen[v] = 1;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& [e, dir] : cover.adjacency[u]) {
      const CoverEdge& ce = cover.edges[e];
      if (cut_mask[ce.base]) continue;
      const int other = dir > 0 ? ce.v : ce.u;
      if (!seen[other]) {
        seen[other] = 1;
        queue.push_back(other);
      }
    }
  }
  for (int v : cover.m1) {
    if (seen[v]) return false;
  }
  return true;
}

std::pair<SeparatingCut, double> min_cut_on_cover(const ToroidalComplex& c,
                                                  const PeriodicCover& cover,
                                                  const Density& g) {
  const int n = static_cast<int>(cover.vertices.size());
  const int s = n;
  const int t = n + 1;
  MaxFlow flow(n + 2);
  std::vector<int> arc_of_edge(cover.edges.size());
  double cap_total = 0.0;
  for (std::size_t e = 0; e < cover.edges.size(); ++e) {
    const CoverEdge& ce = cover.edges[e];
    const double cap = g[ce.base] * (ce.mu / ce.ell);
    cap_total += cap;
    arc_of_edge[e] = flow.add_edge(ce.u, ce.v, cap, cap);
  }
  const double inf_cap = 2.0 * cap_total + 1.0;
  for (int v : cover.m0) flow.add_edge(s, v, inf_cap, 0.0);
  for (int v : cover.m1) flow.add_edge(v, t, inf_cap, 0.0);

  const double value = flow.run(s, t);
  const std::vector<char> side = flow.min_cut_side(s);

  SeparatingCut cut;
  std::set<EdgeId> support;
  for (std::size_t e = 0; e < cover.edges.size(); ++e) {
    const CoverEdge& ce = cover.edges[e];
    if (side[ce.u] != side[ce.v]) support.insert(ce.base);
  }
  cut.edges.assign(support.begin(), support.end());
  for (EdgeId e : cut.edges) cut.h_weight += c.h(e);
  double weight = 0.0;
  for (EdgeId e : cut.edges) weight += g[e] * c.h(e);
  (void)value;  // equals `weight` up to roundoff; the support sum is reported
  return {std::move(cut), weight};
}

// Edges whose increment arc crosses the level t; shared by level_cut and
// the coarea estimator.
std::vector<EdgeId> crossing_edges(const ToroidalComplex& c, const CircleMap& f,
                                   const std::vector<double>& delta, double t) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const double d = delta[e];
    if (d == 0.0) continue;
    if (d > 0.0) {
      const double pos = frac(t - f[c.edges[e].u]);
      if (pos > 0.0 && pos < d) out.push_back(e);
    } else {
      const double pos = frac(f[c.edges[e].u] - t);
      if (pos > 0.0 && pos < -d) out.push_back(e);
    }
  }
  return out;
}

double clear_of_vertex_values(const ToroidalComplex& c, const CircleMap& f, double t) {
  t = frac(t);
  for (int guard = 0; guard < 1000; ++guard) {
    bool hit = false;
    for (VertexId v = 0; v < c.vertex_count(); ++v) {
      double diff = std::abs(f[v] - t);
      diff = std::min(diff, 1.0 - diff);
      if (diff < 1e-12) {
        hit = true;
        break;
      }
    }
    if (!hit) return t;
    t = frac(t + 1e-9);
  }
  throw Error("level_cut: could not perturb t away from vertex values");
}

}  // namespace

bool is_separating(const ToroidalComplex& c, const std::vector<EdgeId>& cut) {
  const PeriodicCover cover = unroll(c, 1);
  std::vector<char> mask(c.edges.size(), 0);
  for (EdgeId e : cut) {
    if (e < 0 || e >= c.edge_count()) {
      throw InvalidArgumentError("is_separating: edge id out of range");
    }
    mask[e] = 1;
  }
  return separates_in_cover(cover, mask);
}

std::pair<SeparatingCut, double> winding_cut_oracle(const ToroidalComplex& c,
                                                    const Density& g) {
  const PeriodicCover cover = unroll(c, 1);
  return min_cut_on_cover(c, cover, g);
}

WindingCutFamily::WindingCutFamily(const ToroidalComplex& c)
    : c_(&c), cover_(std::make_shared<PeriodicCover>(unroll(c, 1))) {}

FamilyMember WindingCutFamily::most_violated(const Density& g) const {
  auto [cut, weight] = min_cut_on_cover(*c_, *cover_, g);
  FamilyMember member;
  if (cut.edges.empty()) {
    // M_0 is already disconnected from M_1, so the empty set separates and
    // its constraint is unsatisfiable: the modulus is infinite.
    return member;
  }
  member.support = cut.edges;
  member.coeffs.reserve(member.support.size());
  for (EdgeId e : member.support) member.coeffs.push_back(c_->h(e));
  member.weight = weight;
  return member;
}

std::vector<FamilyMember> WindingCutFamily::enumerate_all() const {
  return enumerate_minimal_cuts(*c_);
}

SolveReport surface_modulus(const ToroidalComplex& c, double p_star,
                            const SolveOptions& opts) {
  WindingCutFamily family(c);
  return solve_modulus(c, family, p_star, opts);
}

std::vector<EdgeId> level_crossing_edges(const ToroidalComplex& c, const CircleMap& f,
                                         double t) {
  const std::vector<double> delta = edge_increments(c, f);
  t = clear_of_vertex_values(c, f, t);
  return crossing_edges(c, f, delta, t);
}

SeparatingCut level_cut(const ToroidalComplex& c, const CircleMap& f, double t) {
  const std::vector<double> delta = edge_increments(c, f);
  if (degree(c, f) != 1) {
    throw InvalidArgumentError("level_cut: map must have degree 1");
  }
  t = clear_of_vertex_values(c, f, t);
  SeparatingCut cut;
  cut.edges = crossing_edges(c, f, delta, t);
  for (EdgeId e : cut.edges) cut.h_weight += c.h(e);
  if (!is_separating(c, cut.edges)) {
    throw Error("level_cut: crossing set fails the separation check");
  }
  return cut;
}

SurfaceMapResult surface_to_degree_one_map(const ToroidalComplex& c,
                                           const std::vector<EdgeId>& cut,
                                           double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidArgumentError("surface_to_degree_one_map: eps must be positive");
  }
  std::vector<char> cut_mask(c.edges.size(), 0);
  for (EdgeId e : cut) {
    if (e < 0 || e >= c.edge_count()) {
      throw InvalidArgumentError("surface_to_degree_one_map: edge id out of range");
    }
    cut_mask[e] = 1;
  }
  const PeriodicCover cover = unroll(c, 1);
  if (!separates_in_cover(cover, cut_mask)) {
    throw NotSeparatingError("surface_to_degree_one_map: cut does not separate");
  }

  // Base-graph distance from the endpoints of the cut.
  std::vector<double> dist_cut(c.vertices.size(), kInf);
  {
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (EdgeId e : cut) {
      for (VertexId v : {c.edges[e].u, c.edges[e].v}) {
        if (dist_cut[v] > 0.0) {
          dist_cut[v] = 0.0;
          heap.push({0.0, v});
        }
      }
    }
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist_cut[u]) continue;
      for (const auto& [e, dir] : c.adjacency[u]) {
        const Edge& ed = c.edges[e];
        const VertexId other = dir > 0 ? ed.v : ed.u;
        const double nd = d + ed.ell;
        if (nd < dist_cut[other]) {
          dist_cut[other] = nd;
          heap.push({nd, other});
        }
      }
    }
  }

  // Eps-neighborhood: edges entirely within distance eps of the cut. The
  // construction needs room past it, so the neighborhood must not swallow
  // the whole period.
  std::vector<char> in_nbhd(c.edges.size(), 0);
  std::vector<EdgeId> neighborhood;
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    if (std::max(dist_cut[c.edges[e].u], dist_cut[c.edges[e].v]) < eps) {
      in_nbhd[e] = 1;
      neighborhood.push_back(e);
    }
  }
  bool has_far_vertex = false;
  for (VertexId v = 0; v < c.vertex_count(); ++v) {
    if (dist_cut[v] >= eps) {
      has_far_vertex = true;
      break;
    }
  }
  if (!has_far_vertex) {
    throw EpsTooLargeError(
        "surface_to_degree_one_map: neighborhood wraps around the period");
  }

  // Negative side: reachable from M_0 in the cover without crossing the cut.
  std::vector<char> negative(cover.vertices.size(), 0);
  {
    std::deque<int> queue;
    for (int v : cover.m0) {
      negative[v] = 1;
      queue.push_back(v);
    }
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const auto& [e, dir] : cover.adjacency[u]) {
        const CoverEdge& ce = cover.edges[e];
        if (cut_mask[ce.base]) continue;
        const int other = dir > 0 ? ce.v : ce.u;
        if (!negative[other]) {
          negative[other] = 1;
          queue.push_back(other);
        }
      }
    }
  }

  // Crossing distance: shortest chi_N-weighted way from the negative side
  // through the neighborhood.
  std::vector<double> dist_chi(cover.vertices.size(), kInf);
  {
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (std::size_t v = 0; v < cover.vertices.size(); ++v) {
      if (negative[v]) {
        dist_chi[v] = 0.0;
        heap.push({0.0, static_cast<int>(v)});
      }
    }
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist_chi[u]) continue;
      for (const auto& [e, dir] : cover.adjacency[u]) {
        const CoverEdge& ce = cover.edges[e];
        const int other = dir > 0 ? ce.v : ce.u;
        const double nd = d + (in_nbhd[ce.base] ? ce.ell : 0.0);
        if (nd < dist_chi[other]) {
          dist_chi[other] = nd;
          heap.push({nd, other});
        }
      }
    }
  }

  // Calibrate against the far meridian: the deck relation needs the clamped
  // potential to reach one on every M_1 copy, so the crossing distance is
  // the chi-length to the nearest one.
  double crossing = kInf;
  for (int v : cover.m1) crossing = std::min(crossing, dist_chi[v]);
  if (!std::isfinite(crossing) || crossing <= 0.0) {
    throw EpsTooLargeError(
        "surface_to_degree_one_map: no positive crossing distance to the far meridian");
  }

  SurfaceMapResult out;
  out.crossing_distance = crossing;
  out.neighborhood = neighborhood;
  out.rho_psi = Density(c.edges.size(), 0.0);
  for (EdgeId e : neighborhood) out.rho_psi[e] = 1.0 / crossing;

  const int n = c.vertex_count();
  out.potential.resize(n);
  for (VertexId v = 0; v < n; ++v) {
    out.potential[v] = std::min(1.0, dist_chi[v] / crossing);
  }
  out.psi = CircleMap(n);
  for (VertexId v = 0; v < n; ++v) out.psi[v] = frac(out.potential[v]);

  // Certificates: unit-holonomy increments dominated by rho_psi * ell.
  bool edge_fine = true;
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    const double delta = out.potential[ed.v] - out.potential[ed.u] + ed.w;
    if (std::abs(delta) > out.rho_psi[e] * ed.ell + 1e-12) {
      throw EpsTooLargeError(
          "surface_to_degree_one_map: upper-gradient certificate failed");
    }
    if (std::abs(delta) >= 0.5) edge_fine = false;
  }
  out.edge_fine = edge_fine;
  if (edge_fine && degree(c, out.psi) != 1) {
    throw EpsTooLargeError("surface_to_degree_one_map: degree check failed");
  }
  return out;
}

std::vector<FamilyMember> enumerate_minimal_cuts(const ToroidalComplex& c) {
  const PeriodicCover cover = unroll(c, 1);
  std::vector<int> free_vertices;
  std::vector<int> fixed_side(cover.vertices.size(), -1);  // 1 = source side
  for (int v : cover.m0) fixed_side[v] = 1;
  for (int v : cover.m1) fixed_side[v] = 0;
  for (std::size_t v = 0; v < cover.vertices.size(); ++v) {
    if (fixed_side[v] < 0) free_vertices.push_back(static_cast<int>(v));
  }
  if (free_vertices.size() > 22) {
    throw SizeLimitError("enumerate_minimal_cuts: more than 22 free cover vertices");
  }

  std::set<std::vector<EdgeId>> supports;
  std::vector<char> side(cover.vertices.size(), 0);
  const std::size_t combos = std::size_t{1} << free_vertices.size();
  for (std::size_t bits = 0; bits < combos; ++bits) {
    for (std::size_t v = 0; v < cover.vertices.size(); ++v) {
      side[v] = fixed_side[v] == 1 ? 1 : 0;
    }
    for (std::size_t t = 0; t < free_vertices.size(); ++t) {
      if (bits & (std::size_t{1} << t)) side[free_vertices[t]] = 1;
    }
    std::set<EdgeId> support;
    for (const CoverEdge& ce : cover.edges) {
      if (side[ce.u] != side[ce.v]) support.insert(ce.base);
    }
    std::vector<EdgeId> cut(support.begin(), support.end());
    if (cut.empty()) continue;
    std::vector<char> mask(c.edges.size(), 0);
    for (EdgeId e : cut) mask[e] = 1;
    if (!separates_in_cover(cover, mask)) continue;
    bool minimal = true;
    for (EdgeId e : cut) {
      mask[e] = 0;
      if (separates_in_cover(cover, mask)) {
        minimal = false;
        mask[e] = 1;
        break;
      }
      mask[e] = 1;
    }
    if (minimal) supports.insert(std::move(cut));
  }

  std::vector<FamilyMember> members;
  for (const auto& s : supports) {
    FamilyMember m;
    m.support = s;
    m.coeffs.reserve(s.size());
    for (EdgeId e : s) m.coeffs.push_back(c.h(e));
    members.push_back(std::move(m));
  }
  return members;
}

}  // namespace toromod
