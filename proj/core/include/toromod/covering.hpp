#pragma once

#include <optional>
#include <vector>

#include "toromod/complex.hpp"

namespace toromod {

/// Circle-valued vertex function; values are representatives in [0, 1).
struct CircleMap {
  std::vector<double> values;

  CircleMap() = default;
  explicit CircleMap(std::size_t vertex_count, double fill = 0.0)
      : values(vertex_count, fill) {}

  double operator[](VertexId v) const { return values[v]; }
  double& operator[](VertexId v) { return values[v]; }

  bool is_valid() const;
};

/// Real-valued unrolled lift of a circle map on sheets 0..K of the periodic
/// cover. Values on sheet k+1 equal values on sheet k plus deg.
struct LiftedMap {
  int period_count = 1;  // K
  int deg = 0;
  int base_vertex_count = 0;
  std::vector<double> values;  // indexed sheet * base_vertex_count + v

  double at(VertexId v, int sheet) const {
    return values[static_cast<std::size_t>(sheet) * base_vertex_count + v];
  }
};

/// Vertex of a periodic cover: a base vertex on a given sheet.
struct CoverVertex {
  VertexId base = -1;
  int sheet = 0;
};

/// Lifted edge; carries copies of the base weights (the covering projection
/// is a local isometry, so they equal the base values).
struct CoverEdge {
  EdgeId base = -1;
  int u = -1;  // cover vertex indices
  int v = -1;
  double ell = 0.0;
  double mu = 0.0;
};

/// K fundamental periods of the cut-open cover of the complex. Sheets
/// 0..K-1 carry full vertex copies; sheet K holds boundary copies of the
/// meridian slice only. Every base edge has exactly K lifts. M_0 and M_1
/// are the meridian boundary slices of the whole strip.
struct PeriodicCover {
  const ToroidalComplex* base = nullptr;
  int periods = 1;
  std::vector<CoverVertex> vertices;
  std::vector<CoverEdge> edges;
  std::vector<int> m0;  // cover vertex indices, ascending
  std::vector<int> m1;
  std::vector<std::vector<std::pair<int, int>>> adjacency;  // (cover edge, dir)

  /// Cover index of (v, sheet); -1 if that copy does not exist.
  int index_of(VertexId v, int sheet) const;
};

/// Base vertices on the positive side of the meridian (heads of crossing
/// edges), ascending. Every winding-1 cycle passes through one of them.
std::vector<VertexId> meridian_slice(const ToroidalComplex& c);

/// Signed sum of the winding cocycle along a closed walk. Additive under
/// concatenation, negated under reversal. The empty walk has winding 0.
int winding_number(const ToroidalComplex& c, const std::vector<OrientedEdge>& walk);

/// Per-edge increment of f: the unique representative of f(v) - f(u) mod 1
/// in (-1/2, 1/2], for the canonical orientation u -> v.
/// Throws NotEdgeFineError when some |delta| equals 1/2 exactly and
/// FaceInconsistentError when increments do not sum to zero around a face.
std::vector<double> edge_increments(const ToroidalComplex& c, const CircleMap& f);

/// Degree of an edge-fine, face-consistent circle map: the increment sum
/// along any winding-1 cycle.
int degree(const ToroidalComplex& c, const CircleMap& f);

/// Materialize K periods of the cut-open cover.
PeriodicCover unroll(const ToroidalComplex& c, int K);

/// Lift of an edge-fine circle map to sheets 0..K, anchored so the sheet-0
/// value at base vertex 0 lies in [0, 1). Satisfies the deck relation
/// lift(v, k+1) - lift(v, k) = degree(f).
LiftedMap lift(const ToroidalComplex& c, const CircleMap& f, int K = 1);

/// Projection of a lifted map back to a circle map. Verifies the deck
/// relation within 1e-9 and throws DeckRelationError otherwise.
CircleMap project(const ToroidalComplex& c, const LiftedMap& g);

/// Some winding-1 cycle, as an oriented closed walk in the base, found
/// constructively in the one-period cover; nullopt if none exists.
std::optional<std::vector<OrientedEdge>> find_winding_one_cycle(const ToroidalComplex& c);

bool has_winding_one_cycle(const ToroidalComplex& c);

}  // namespace toromod
