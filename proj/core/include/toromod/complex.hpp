#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "toromod/errors.hpp"

namespace toromod {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

/// A vertex of the complex. Vertex measure is carried along for scaling and
/// reporting; the solvers integrate against edge measures only.
struct Vertex {
  double mu = 0.0;
};

/// An edge of the complex with its canonical orientation u -> v.
/// The codimension-1 weight h = mu / ell is always derived, never stored.
struct Edge {
  VertexId u = -1;
  VertexId v = -1;
  double ell = 0.0;  // length
  double mu = 0.0;   // measure (q-dimensional volume attributed to the edge)
  int w = 0;         // winding cocycle value for the orientation u -> v
};

/// One step of an oriented edge walk: edge `edge` traversed forward
/// (dir = +1, from u to v) or backward (dir = -1).
struct OrientedEdge {
  EdgeId edge = -1;
  int dir = +1;
};

/// A face is a closed chain of 3 or 4 oriented edges; consecutive entries
/// share head-to-tail vertices and the chain closes up.
struct Face {
  std::vector<OrientedEdge> loop;
};

/// One invariant violation found by validate().
struct Violation {
  std::string code;     // stable machine-readable tag, e.g. "edge_length_nonpositive"
  std::string message;  // human-readable description
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Discrete toroidal metric measure complex: a weighted graph with faces,
/// edge lengths and measures, and an integer winding cocycle whose pairing
/// with cycles gives winding numbers. Immutable by convention after
/// construction or load; all solver entry points take it by const reference.
struct ToroidalComplex {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Face> faces;
  double q = 3.0;  // Ahlfors exponent; used by scale_metric and reports only
  std::string meta;  // builder provenance, serialized with the complex

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  /// Codimension-1 weight of an edge, always recomputed as mu / ell.
  double h(EdgeId e) const { return edges[e].mu / edges[e].ell; }

  double total_edge_measure() const;

  /// Adjacency as (edge id, +1 if this vertex is the tail u, -1 if head v).
  /// Built lazily by builders/load; required by all graph traversals.
  std::vector<std::vector<std::pair<EdgeId, int>>> adjacency;
  void rebuild_adjacency();
};

/// Nonnegative function on edges. Serves both as path density rho and as
/// surface density g.
struct Density {
  std::vector<double> values;

  Density() = default;
  explicit Density(std::size_t edge_count, double fill = 0.0)
      : values(edge_count, fill) {}

  double operator[](EdgeId e) const { return values[e]; }
  double& operator[](EdgeId e) { return values[e]; }
  std::size_t size() const { return values.size(); }

  /// True iff every value is finite and >= 0.
  bool is_valid() const;
};

/// Conformal warp factor omega(theta, r, phi) > 0; theta in [0, 2*pi) is the
/// toroidal angle, r in [0, R] the disk radius, phi in [0, 2*pi) the disk angle.
using WarpFn = std::function<double(double theta, double r, double phi)>;

/// Named warp presets: "flat" (omega == 1) and "sin:beta" (1 + beta*sin(theta)).
WarpFn make_warp(const std::string& spec);

/// Degenerate solid torus with a point cross-section: a cycle graph with m
/// edges of length L/m, edge measure L*A/m (so h == A), and a single
/// crossing edge carrying the winding cocycle. Exact-oracle geometry.
ToroidalComplex build_ring(int m, double L, double A);

/// Structured product mesh of a solid torus: k_theta angular slices of a
/// polar disk grid with n_r rings and n_phi sectors, tube length L, disk
/// radius R. Lengths come from the product geometry scaled by omega at edge
/// midpoints; cell measures carry omega^q and are distributed to edges so
/// the total equals the warped volume. Winding is +1 exactly on edges
/// crossing the theta = 0 meridian.
ToroidalComplex build_solid_torus(int k_theta, int n_r, int n_phi, double L,
                                  double R, const WarpFn& warp = {});

/// Fraction of each slab's measure attributed to in-slice (disk) edges by
/// build_solid_torus; the rest sits on longitudinal edges, whose dual areas
/// tile the cross-section exactly.
inline constexpr double kDiskMeasureShare = 0.02;

/// Report every violated invariant; empty report iff the complex is valid.
ValidationReport validate(const ToroidalComplex& c);

/// Throwing wrapper around validate() for construction and load paths.
void validate_or_throw(const ToroidalComplex& c);

/// Metric scaling: ell -> s*ell, mu -> s^q * mu (edges and vertices), hence
/// h -> s^(q-1) * h.
ToroidalComplex scale_metric(const ToroidalComplex& c, double s);

}  // namespace toromod
