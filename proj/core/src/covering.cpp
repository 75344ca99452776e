#include "toromod/covering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace toromod {

namespace {

double wrap_half(double d) {
  // Representative of d mod 1 in [-1/2, 1/2]; the +-1/2 ambiguity is
  // rejected by the caller.
  double r = d - std::floor(d);
  if (r > 0.5) r -= 1.0;
  return r;
}

double frac(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // guard against floor rounding at negative ulps
  return r;
}

}  // namespace

bool CircleMap::is_valid() const {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || v >= 1.0) return false;
  }
  return true;
}

std::vector<VertexId> meridian_slice(const ToroidalComplex& c) {
  std::vector<char> is_head(c.vertices.size(), 0);
  for (const Edge& e : c.edges) {
    if (e.w == 1) is_head[e.v] = 1;
    if (e.w == -1) is_head[e.u] = 1;
  }
  std::vector<VertexId> heads;
  for (VertexId v = 0; v < c.vertex_count(); ++v) {
    if (is_head[v]) heads.push_back(v);
  }
  return heads;
}

int winding_number(const ToroidalComplex& c, const std::vector<OrientedEdge>& walk) {
  if (walk.empty()) return 0;
  int sum = 0;
  VertexId cursor = -1;
  for (std::size_t t = 0; t < walk.size(); ++t) {
    const OrientedEdge& oe = walk[t];
    if (oe.edge < 0 || oe.edge >= c.edge_count() || (oe.dir != 1 && oe.dir != -1)) {
      throw InvalidArgumentError("winding_number: bad oriented edge in walk");
    }
    const Edge& e = c.edges[oe.edge];
    const VertexId tail = oe.dir > 0 ? e.u : e.v;
    const VertexId head = oe.dir > 0 ? e.v : e.u;
    if (t == 0) {
      cursor = tail;
    } else if (cursor != tail) {
      throw InvalidArgumentError("winding_number: walk is not connected");
    }
    cursor = head;
    sum += oe.dir * e.w;
  }
  const Edge& first = c.edges[walk.front().edge];
  const VertexId start = walk.front().dir > 0 ? first.u : first.v;
  if (cursor != start) {
    throw InvalidArgumentError("winding_number: walk is not closed");
  }
  return sum;
}

std::vector<double> edge_increments(const ToroidalComplex& c, const CircleMap& f) {
  if (f.values.size() != c.vertices.size()) {
    throw InvalidArgumentError("edge_increments: map size does not match complex");
  }
  std::vector<double> delta(c.edges.size(), 0.0);
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    const double d = wrap_half(f[ed.v] - f[ed.u]);
    if (std::abs(d) == 0.5) {
      throw NotEdgeFineError("edge " + std::to_string(e) +
                             " has ambiguous increment +-1/2");
    }
    delta[e] = d;
  }
  for (std::size_t fi = 0; fi < c.faces.size(); ++fi) {
    double sum = 0.0;
    for (const OrientedEdge& oe : c.faces[fi].loop) sum += oe.dir * delta[oe.edge];
    if (std::lround(sum) != 0) {
      throw FaceInconsistentError("increments wind around face " + std::to_string(fi));
    }
  }
  return delta;
}

int degree(const ToroidalComplex& c, const CircleMap& f) {
  const std::vector<double> delta = edge_increments(c, f);
  auto cycle = find_winding_one_cycle(c);
  if (!cycle) {
    throw ValidationError("degree: complex has no winding-1 cycle");
  }
  double sum = 0.0;
  for (const OrientedEdge& oe : *cycle) sum += oe.dir * delta[oe.edge];
  const long deg = std::lround(sum);
  if (std::abs(sum - static_cast<double>(deg)) > 1e-9) {
    throw LiftInconsistentError("degree: non-integer increment sum on winding cycle");
  }
  return static_cast<int>(deg);
}

int PeriodicCover::index_of(VertexId v, int sheet) const {
  const int n = base->vertex_count();
  if (sheet >= 0 && sheet < periods) return sheet * n + v;
  if (sheet == periods) {
    // boundary copies live after the full sheets, in ascending base order
    for (std::size_t i = periods * static_cast<std::size_t>(n); i < vertices.size(); ++i) {
      if (vertices[i].base == v) return static_cast<int>(i);
    }
  }
  return -1;
}

PeriodicCover unroll(const ToroidalComplex& c, int K) {
  if (K < 1) throw InvalidArgumentError("unroll: K must be >= 1");
  PeriodicCover cover;
  cover.base = &c;
  cover.periods = K;
  const int n = c.vertex_count();
  for (int k = 0; k < K; ++k) {
    for (VertexId v = 0; v < n; ++v) cover.vertices.push_back({v, k});
  }
  const std::vector<VertexId> heads = meridian_slice(c);
  std::vector<int> boundary_index(n, -1);
  for (VertexId v : heads) {
    boundary_index[v] = static_cast<int>(cover.vertices.size());
    cover.vertices.push_back({v, K});
  }
  auto cover_index = [&](VertexId v, int sheet) {
    return sheet < K ? sheet * n + v : boundary_index[v];
  };

  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    for (int k = 0; k < K; ++k) {
      // Shift lifts of downward-crossing edges so every lift stays in 0..K.
      const int tail_sheet = k - std::min(ed.w, 0);
      const int head_sheet = tail_sheet + ed.w;
      CoverEdge ce;
      ce.base = e;
      ce.u = cover_index(ed.u, tail_sheet);
      ce.v = cover_index(ed.v, head_sheet);
      ce.ell = ed.ell;
      ce.mu = ed.mu;
      cover.edges.push_back(ce);
    }
  }

  for (VertexId v : heads) {
    cover.m0.push_back(cover_index(v, 0));
    cover.m1.push_back(cover_index(v, K));
  }

  cover.adjacency.assign(cover.vertices.size(), {});
  for (std::size_t e = 0; e < cover.edges.size(); ++e) {
    cover.adjacency[cover.edges[e].u].push_back({static_cast<int>(e), +1});
    cover.adjacency[cover.edges[e].v].push_back({static_cast<int>(e), -1});
  }
  return cover;
}

LiftedMap lift(const ToroidalComplex& c, const CircleMap& f, int K) {
  if (K < 1) throw InvalidArgumentError("lift: K must be >= 1");
  const std::vector<double> delta = edge_increments(c, f);
  const int deg = degree(c, f);
  const int n = c.vertex_count();

  // Sheet-0 values solve g(v) - g(u) = delta_e - w_e * deg along a spanning
  // forest; the cocycle relation makes the result edge-independent.
  std::vector<double> g(n, 0.0);
  std::vector<char> seen(n, 0);
  for (VertexId root = 0; root < n; ++root) {
    if (seen[root]) continue;
    g[root] = f[root];
    seen[root] = 1;
    std::deque<VertexId> queue{root};
    while (!queue.empty()) {
      const VertexId u = queue.front();
      queue.pop_front();
      for (const auto& [e, dir] : c.adjacency[u]) {
        const Edge& ed = c.edges[e];
        const VertexId other = dir > 0 ? ed.v : ed.u;
        if (seen[other]) continue;
        const double step = delta[e] - static_cast<double>(ed.w) * deg;
        g[other] = g[u] + dir * step;
        seen[other] = 1;
        queue.push_back(other);
      }
    }
  }
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    const double want = delta[e] - static_cast<double>(ed.w) * deg;
    if (std::abs(g[ed.v] - g[ed.u] - want) > 1e-9) {
      throw LiftInconsistentError("lift: increments are not exact on edge " +
                                  std::to_string(e));
    }
  }

  LiftedMap out;
  out.period_count = K;
  out.deg = deg;
  out.base_vertex_count = n;
  out.values.resize(static_cast<std::size_t>(K + 1) * n);
  for (int k = 0; k <= K; ++k) {
    for (VertexId v = 0; v < n; ++v) {
      out.values[static_cast<std::size_t>(k) * n + v] = g[v] + static_cast<double>(k) * deg;
    }
  }
  return out;
}

CircleMap project(const ToroidalComplex& c, const LiftedMap& g) {
  const int n = c.vertex_count();
  if (g.base_vertex_count != n ||
      g.values.size() != static_cast<std::size_t>(g.period_count + 1) * n) {
    throw InvalidArgumentError("project: lifted map does not match complex");
  }
  for (int k = 0; k < g.period_count; ++k) {
    for (VertexId v = 0; v < n; ++v) {
      const double shift = g.at(v, k + 1) - g.at(v, k);
      if (std::abs(shift - static_cast<double>(g.deg)) > 1e-9) {
        throw DeckRelationError("project: deck relation violated at vertex " +
                                std::to_string(v) + ", sheet " + std::to_string(k));
      }
    }
  }
  CircleMap f(n);
  for (VertexId v = 0; v < n; ++v) f[v] = frac(g.at(v, 0));
  return f;
}

std::optional<std::vector<OrientedEdge>> find_winding_one_cycle(const ToroidalComplex& c) {
  const PeriodicCover cover = unroll(c, 1);
  for (std::size_t hi = 0; hi < cover.m0.size(); ++hi) {
    const int src = cover.m0[hi];
    const int dst = cover.m1[hi];
    std::vector<int> parent_edge(cover.vertices.size(), -1);
    std::vector<int> parent_dir(cover.vertices.size(), 0);
    std::vector<char> seen(cover.vertices.size(), 0);
    std::deque<int> queue{src};
    seen[src] = 1;
    while (!queue.empty() && !seen[dst]) {
      const int u = queue.front();
      queue.pop_front();
      for (const auto& [e, dir] : cover.adjacency[u]) {
        const int other = dir > 0 ? cover.edges[e].v : cover.edges[e].u;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_edge[other] = e;
        parent_dir[other] = dir;
        queue.push_back(other);
      }
    }
    if (!seen[dst]) continue;
    std::vector<OrientedEdge> walk;
    int cursor = dst;
    while (cursor != src) {
      const int e = parent_edge[cursor];
      walk.push_back({cover.edges[e].base, parent_dir[cursor]});
      cursor = parent_dir[cursor] > 0 ? cover.edges[e].u : cover.edges[e].v;
    }
    std::reverse(walk.begin(), walk.end());
    return walk;
  }
  return std::nullopt;
}

bool has_winding_one_cycle(const ToroidalComplex& c) {
  return find_winding_one_cycle(c).has_value();
}

}  // namespace toromod
