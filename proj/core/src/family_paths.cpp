#include "toromod/family_paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace toromod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CoverPath {
  std::vector<OrientedEdge> walk;  // projected to base, in traversal order
  double length = 0.0;
  bool found = false;
};

// Shortest (src -> dst) path in the cover under weights rho_e * ell_e,
// pruned against an upper bound from earlier sources.
CoverPath shortest_cover_path(const PeriodicCover& cover, const Density& rho,
                              int src, int dst, double bound) {
  const std::size_t n = cover.vertices.size();
  std::vector<double> dist(n, kInf);
  std::vector<int> parent_edge(n, -1), parent_dir(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[src] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == dst) break;
    if (d > bound) break;
    for (const auto& [e, dir] : cover.adjacency[u]) {
      const CoverEdge& ce = cover.edges[e];
      const int other = dir > 0 ? ce.v : ce.u;
      const double nd = d + rho[ce.base] * ce.ell;
      if (nd < dist[other]) {
        dist[other] = nd;
        parent_edge[other] = e;
        parent_dir[other] = dir;
        heap.push({nd, other});
      }
    }
  }
  CoverPath out;
  if (dist[dst] == kInf) return out;
  out.found = true;
  out.length = dist[dst];
  int cursor = dst;
  while (cursor != src) {
    const CoverEdge& ce = cover.edges[parent_edge[cursor]];
    out.walk.push_back({ce.base, parent_dir[cursor]});
    cursor = parent_dir[cursor] > 0 ? ce.u : ce.v;
  }
  std::reverse(out.walk.begin(), out.walk.end());
  return out;
}

WindingCycle cycle_from_path(const ToroidalComplex& c, const Density& rho,
                             const CoverPath& path) {
  WindingCycle cycle;
  cycle.walk = path.walk;
  cycle.winding = winding_number(c, cycle.walk);
  std::set<EdgeId> support;
  for (const OrientedEdge& oe : cycle.walk) support.insert(oe.edge);
  cycle.support.assign(support.begin(), support.end());
  cycle.weight = 0.0;
  for (EdgeId e : cycle.support) cycle.weight += rho[e] * c.edges[e].ell;
  return cycle;
}

}  // namespace

WindingCycle winding_cycle_oracle(const ToroidalComplex& c, const Density& rho) {
  const PeriodicCover cover = unroll(c, 1);
  CoverPath best;
  for (std::size_t i = 0; i < cover.m0.size(); ++i) {
    CoverPath path = shortest_cover_path(cover, rho, cover.m0[i], cover.m1[i],
                                         best.found ? best.length : kInf);
    if (path.found && (!best.found || path.length < best.length)) {
      best = std::move(path);
    }
  }
  if (!best.found) {
    throw ValidationError("winding_cycle_oracle: complex has no winding-1 cycle");
  }
  return cycle_from_path(c, rho, best);
}

WindingCycleFamily::WindingCycleFamily(const ToroidalComplex& c)
    : c_(&c), cover_(std::make_shared<PeriodicCover>(unroll(c, 1))) {}

FamilyMember WindingCycleFamily::most_violated(const Density& rho) const {
  FamilyMember member;
  const PeriodicCover& cover = *cover_;
  if (cover.m0.empty()) {
    member.family_empty = true;
    return member;
  }
  // Ties go to the earliest slice vertex (strict improvement only).
  // TODO: compare tied paths by lexicographic support to pin reports across
  // standard-library heap implementations as well.
  CoverPath best;
  double bound = kInf;
  for (std::size_t i = 0; i < cover.m0.size(); ++i) {
    CoverPath path = shortest_cover_path(cover, rho, cover.m0[i], cover.m1[i], bound);
    if (path.found && (!best.found || path.length < best.length)) {
      best = std::move(path);
      bound = best.length;
    }
  }
  if (!best.found) {
    member.family_empty = true;
    return member;
  }
  const WindingCycle cycle = cycle_from_path(*c_, rho, best);
  member.support = cycle.support;
  member.coeffs.reserve(member.support.size());
  for (EdgeId e : member.support) member.coeffs.push_back(c_->edges[e].ell);
  member.weight = cycle.weight;
  return member;
}

std::vector<FamilyMember> WindingCycleFamily::enumerate_all() const {
  return enumerate_winding_cycles(*c_);
}

SolveReport path_modulus(const ToroidalComplex& c, double p, const SolveOptions& opts) {
  WindingCycleFamily family(c);
  return solve_modulus(c, family, p, opts);
}

std::vector<FamilyMember> enumerate_winding_cycles(const ToroidalComplex& c) {
  if (c.edge_count() > 24) {
    throw SizeLimitError("enumerate_winding_cycles: more than 24 edges");
  }
  const PeriodicCover cover = unroll(c, 1);
  std::set<std::vector<EdgeId>> supports;
  const std::size_t raw_cap = 2000000;
  std::size_t visited_paths = 0;

  std::vector<char> on_path(cover.vertices.size(), 0);
  std::vector<EdgeId> stack_support;
  auto dfs = [&](auto&& self, int u, int dst) -> void {
    if (u == dst) {
      std::vector<EdgeId> support = stack_support;
      std::sort(support.begin(), support.end());
      support.erase(std::unique(support.begin(), support.end()), support.end());
      supports.insert(std::move(support));
      if (++visited_paths > raw_cap) {
        throw SizeLimitError("enumerate_winding_cycles: path explosion");
      }
      return;
    }
    for (const auto& [e, dir] : cover.adjacency[u]) {
      const CoverEdge& ce = cover.edges[e];
      const int other = dir > 0 ? ce.v : ce.u;
      if (on_path[other]) continue;
      on_path[other] = 1;
      stack_support.push_back(ce.base);
      self(self, other, dst);
      stack_support.pop_back();
      on_path[other] = 0;
    }
  };
  for (std::size_t i = 0; i < cover.m0.size(); ++i) {
    std::fill(on_path.begin(), on_path.end(), 0);
    on_path[cover.m0[i]] = 1;
    stack_support.clear();
    dfs(dfs, cover.m0[i], cover.m1[i]);
  }

  // Drop supports that strictly contain another; the contained member's
  // constraint implies theirs.
  std::vector<std::vector<EdgeId>> kept;
  for (const auto& s : supports) {
    bool minimal = true;
    for (const auto& other : supports) {
      if (&other == &s || other.size() >= s.size()) continue;
      if (std::includes(s.begin(), s.end(), other.begin(), other.end())) {
        minimal = false;
        break;
      }
    }
    if (minimal) kept.push_back(s);
  }

  std::vector<FamilyMember> members;
  for (auto& s : kept) {
    FamilyMember m;
    m.coeffs.reserve(s.size());
    for (EdgeId e : s) m.coeffs.push_back(c.edges[e].ell);
    m.support = std::move(s);
    members.push_back(std::move(m));
  }
  return members;
}

}  // namespace toromod
