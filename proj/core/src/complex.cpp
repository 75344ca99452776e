#include "toromod/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "toromod/covering.hpp"

namespace toromod {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(double x) { return std::isfinite(x); }

std::string format_param(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double warp_or_one(const WarpFn& warp, double theta, double r, double phi) {
  if (!warp) return 1.0;
  double w = warp(theta, r, phi);
  if (!finite(w) || w <= 0.0) {
    throw InvalidArgumentError("warp factor must be positive and finite");
  }
  return w;
}

}  // namespace

double ToroidalComplex::total_edge_measure() const {
  double total = 0.0;
  for (const Edge& e : edges) total += e.mu;
  return total;
}

void ToroidalComplex::rebuild_adjacency() {
  adjacency.assign(vertices.size(), {});
  for (EdgeId e = 0; e < edge_count(); ++e) {
    adjacency[edges[e].u].push_back({e, +1});
    adjacency[edges[e].v].push_back({e, -1});
  }
}

bool Density::is_valid() const {
  for (double v : values) {
    if (!finite(v) || v < 0.0) return false;
  }
  return true;
}

WarpFn make_warp(const std::string& spec) {
  if (spec.empty() || spec == "flat") {
    return {};
  }
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  double beta = 0.0;
  if (colon != std::string::npos) {
    try {
      beta = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidArgumentError("bad warp amplitude in '" + spec + "'");
    }
  }
  if (name == "sin") {
    if (std::abs(beta) >= 1.0) {
      throw InvalidArgumentError("sin warp needs |beta| < 1 to stay positive");
    }
    return [beta](double theta, double, double) {
      return 1.0 + beta * std::sin(theta);
    };
  }
  throw InvalidArgumentError("unknown warp preset '" + name + "'");
}

ToroidalComplex build_ring(int m, double L, double A) {
  if (m < 3) throw InvalidArgumentError("build_ring: m must be >= 3");
  if (!(L > 0.0) || !finite(L)) throw InvalidArgumentError("build_ring: L must be positive");
  if (!(A > 0.0) || !finite(A)) throw InvalidArgumentError("build_ring: A must be positive");

  ToroidalComplex c;
  c.q = 3.0;
  c.vertices.assign(m, Vertex{0.0});
  c.edges.reserve(m);
  const double ell = L / m;
  const double mu = L * A / m;
  for (int i = 0; i < m; ++i) {
    Edge e;
    e.u = i;
    e.v = (i + 1) % m;
    e.ell = ell;
    e.mu = mu;
    e.w = (i == m - 1) ? 1 : 0;  // single crossing edge closes the loop
    c.edges.push_back(e);
  }
  c.meta = "{\"builder\":\"ring\",\"m\":" + std::to_string(m) +
           ",\"L\":" + format_param(L) + ",\"A\":" + format_param(A) + "}";
  c.rebuild_adjacency();
  validate_or_throw(c);
  return c;
}

ToroidalComplex build_solid_torus(int k_theta, int n_r, int n_phi, double L,
                                  double R, const WarpFn& warp) {
  if (k_theta < 3) throw InvalidArgumentError("build_solid_torus: k_theta must be >= 3");
  if (n_r < 1) throw InvalidArgumentError("build_solid_torus: n_r must be >= 1");
  if (n_phi < 3) throw InvalidArgumentError("build_solid_torus: n_phi must be >= 3");
  if (!(L > 0.0) || !finite(L)) throw InvalidArgumentError("build_solid_torus: L must be positive");
  if (!(R > 0.0) || !finite(R)) throw InvalidArgumentError("build_solid_torus: R must be positive");

  const int k = k_theta;
  const int slice_size = 1 + n_r * n_phi;
  const double dr = R / n_r;
  const double dphi = 2.0 * kPi / n_phi;
  const double dz = L / k;
  const double q = 3.0;

  // Disk position indexing: 0 = center, 1 + (j-1)*n_phi + l for ring j >= 1.
  auto pos_index = [&](int j, int l) {
    return j == 0 ? 0 : 1 + (j - 1) * n_phi + ((l % n_phi + n_phi) % n_phi);
  };
  auto vertex_id = [&](int i, int j, int l) {
    return ((i % k + k) % k) * slice_size + pos_index(j, l);
  };
  auto theta_of = [&](double i) { return 2.0 * kPi * i / k; };
  auto r_of = [&](int j) { return j * dr; };
  auto phi_of = [&](double l) { return l * dphi; };

  // Dual cross-section areas per disk position; they tile the disk exactly.
  std::vector<double> dual_area(slice_size, 0.0);
  dual_area[0] = kPi * (dr / 2.0) * (dr / 2.0);
  for (int j = 1; j <= n_r; ++j) {
    const double r_in = r_of(j) - dr / 2.0;
    const double r_out = (j == n_r) ? R : r_of(j) + dr / 2.0;
    const double a = (r_out * r_out - r_in * r_in) / 2.0 * dphi;
    for (int l = 0; l < n_phi; ++l) dual_area[pos_index(j, l)] = a;
  }

  ToroidalComplex c;
  c.q = q;
  c.vertices.assign(static_cast<std::size_t>(k) * slice_size, Vertex{0.0});

  // Edge id tables for face construction.
  std::vector<std::vector<EdgeId>> long_id(k, std::vector<EdgeId>(slice_size, -1));
  // radial_id[i][j][l]: edge from ring j (or center for j = 0) to ring j+1.
  std::vector<std::vector<std::vector<EdgeId>>> radial_id(
      k, std::vector<std::vector<EdgeId>>(n_r, std::vector<EdgeId>(n_phi, -1)));
  std::vector<std::vector<std::vector<EdgeId>>> azim_id(
      k, std::vector<std::vector<EdgeId>>(n_r + 1, std::vector<EdgeId>(n_phi, -1)));

  // Longitudinal edges with provisional measure = dual area (rescaled below).
  std::vector<std::vector<double>> long_weight(k, std::vector<double>(slice_size, 0.0));
  for (int i = 0; i < k; ++i) {
    const double theta_mid = theta_of(i + 0.5);
    for (int j = 0; j <= n_r; ++j) {
      const int lmax = (j == 0) ? 1 : n_phi;
      for (int l = 0; l < lmax; ++l) {
        const double om = warp_or_one(warp, theta_mid, r_of(j), phi_of(l));
        Edge e;
        e.u = vertex_id(i, j, l);
        e.v = vertex_id(i + 1, j, l);
        e.ell = dz * om;
        e.mu = 1.0;  // placeholder, overwritten by the slab distribution
        e.w = (i == k - 1) ? 1 : 0;
        long_id[i][pos_index(j, l)] = c.edge_count();
        long_weight[i][pos_index(j, l)] =
            dual_area[pos_index(j, l)] * std::pow(om, q);
        c.edges.push_back(e);
      }
    }
  }

  // In-slice (disk) edges with provisional dual-volume weights.
  std::vector<std::vector<double>> disk_weight(k);
  std::vector<std::vector<EdgeId>> disk_edges(k);
  for (int i = 0; i < k; ++i) {
    const double theta = theta_of(i);
    for (int j = 0; j < n_r; ++j) {
      for (int l = 0; l < n_phi; ++l) {
        // Radial edge from ring j (center when j = 0) outward to ring j+1.
        const double r_mid = r_of(j) + dr / 2.0;
        const double om = warp_or_one(warp, theta, r_mid, phi_of(l));
        Edge e;
        e.u = vertex_id(i, j, j == 0 ? 0 : l);
        e.v = vertex_id(i, j + 1, l);
        e.ell = dr * om;
        e.mu = 1.0;
        e.w = 0;
        radial_id[i][j][l] = c.edge_count();
        disk_edges[i].push_back(c.edge_count());
        disk_weight[i].push_back(dr * (r_mid * dphi) * dz * std::pow(om, q));
        c.edges.push_back(e);
      }
    }
    for (int j = 1; j <= n_r; ++j) {
      for (int l = 0; l < n_phi; ++l) {
        const double om = warp_or_one(warp, theta, r_of(j), phi_of(l + 0.5));
        Edge e;
        e.u = vertex_id(i, j, l);
        e.v = vertex_id(i, j, l + 1);
        e.ell = r_of(j) * dphi * om;
        e.mu = 1.0;
        e.w = 0;
        azim_id[i][j][l] = c.edge_count();
        disk_edges[i].push_back(c.edge_count());
        disk_weight[i].push_back((r_of(j) * dphi) * dr * dz * std::pow(om, q));
        c.edges.push_back(e);
      }
    }
  }

  // Slab volumes with omega^q sampled at cell centers; flat cell areas are
  // exact polar areas so the flat total is exactly pi R^2 L.
  std::vector<double> slab_vol(k, 0.0);
  for (int i = 0; i < k; ++i) {
    const double theta_mid = theta_of(i + 0.5);
    double vol = 0.0;
    for (int l = 0; l < n_phi; ++l) {
      const double area_c = dr * dr / 2.0 * dphi;
      vol += area_c * dz *
             std::pow(warp_or_one(warp, theta_mid, dr / 2.0, phi_of(l + 0.5)), q);
      for (int j = 1; j < n_r; ++j) {
        const double area =
            (r_of(j + 1) * r_of(j + 1) - r_of(j) * r_of(j)) / 2.0 * dphi;
        vol += area * dz *
               std::pow(warp_or_one(warp, theta_mid, r_of(j) + dr / 2.0,
                                    phi_of(l + 0.5)),
                        q);
      }
    }
    slab_vol[i] = vol;
  }

  // Distribute measure: (1 - share) of each slab to its longitudinal edges,
  // the rest to the disk edges of the two bounding slices.
  const double share = kDiskMeasureShare;
  for (int i = 0; i < k; ++i) {
    double wsum = 0.0;
    for (int p = 0; p < slice_size; ++p) wsum += long_weight[i][p];
    for (int p = 0; p < slice_size; ++p) {
      c.edges[long_id[i][p]].mu =
          (1.0 - share) * slab_vol[i] * long_weight[i][p] / wsum;
    }
  }
  for (int i = 0; i < k; ++i) {
    const double vol_slice = (slab_vol[(i + k - 1) % k] + slab_vol[i]) / 2.0;
    double wsum = 0.0;
    for (double w : disk_weight[i]) wsum += w;
    for (std::size_t t = 0; t < disk_edges[i].size(); ++t) {
      c.edges[disk_edges[i][t]].mu = share * vol_slice * disk_weight[i][t] / wsum;
    }
  }

  // Faces. Disk faces per slice: center triangles and annular quads.
  for (int i = 0; i < k; ++i) {
    for (int l = 0; l < n_phi; ++l) {
      Face tri;
      tri.loop = {{radial_id[i][0][l], +1},
                  {azim_id[i][1][l], +1},
                  {radial_id[i][0][(l + 1) % n_phi], -1}};
      c.faces.push_back(std::move(tri));
      for (int j = 1; j < n_r; ++j) {
        Face quad;
        quad.loop = {{radial_id[i][j][l], +1},
                     {azim_id[i][j + 1][l], +1},
                     {radial_id[i][j][(l + 1) % n_phi], -1},
                     {azim_id[i][j][l], -1}};
        c.faces.push_back(std::move(quad));
      }
    }
  }
  // Longitudinal x radial quads.
  for (int i = 0; i < k; ++i) {
    const int i1 = (i + 1) % k;
    for (int j = 0; j < n_r; ++j) {
      for (int l = 0; l < n_phi; ++l) {
        Face quad;
        quad.loop = {{radial_id[i][j][l], +1},
                     {long_id[i][pos_index(j + 1, l)], +1},
                     {radial_id[i1][j][l], -1},
                     {long_id[i][pos_index(j, j == 0 ? 0 : l)], -1}};
        c.faces.push_back(std::move(quad));
      }
    }
  }
  // Longitudinal x azimuthal quads.
  for (int i = 0; i < k; ++i) {
    const int i1 = (i + 1) % k;
    for (int j = 1; j <= n_r; ++j) {
      for (int l = 0; l < n_phi; ++l) {
        Face quad;
        quad.loop = {{azim_id[i][j][l], +1},
                     {long_id[i][pos_index(j, l + 1)], +1},
                     {azim_id[i1][j][l], -1},
                     {long_id[i][pos_index(j, l)], -1}};
        c.faces.push_back(std::move(quad));
      }
    }
  }

  c.meta = "{\"builder\":\"torus\",\"k_theta\":" + std::to_string(k) +
           ",\"n_r\":" + std::to_string(n_r) + ",\"n_phi\":" + std::to_string(n_phi) +
           ",\"L\":" + format_param(L) + ",\"R\":" + format_param(R) + "}";
  c.rebuild_adjacency();
  validate_or_throw(c);
  return c;
}

ValidationReport validate(const ToroidalComplex& c) {
  ValidationReport report;
  auto flag = [&](const std::string& code, const std::string& msg) {
    report.violations.push_back({code, msg});
  };

  if (!(c.q > 0.0) || !finite(c.q)) {
    flag("q_nonpositive", "dimension exponent q must be positive");
  }
  for (std::size_t v = 0; v < c.vertices.size(); ++v) {
    const double mu = c.vertices[v].mu;
    if (!finite(mu) || mu < 0.0) {
      flag("vertex_measure_negative", "vertex " + std::to_string(v) + " has mu < 0");
    }
  }
  const int n = c.vertex_count();
  bool graph_ok = true;
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    const std::string id = std::to_string(e);
    if (ed.u < 0 || ed.u >= n || ed.v < 0 || ed.v >= n) {
      flag("edge_endpoint_invalid", "edge " + id + " endpoint out of range");
      graph_ok = false;
      continue;
    }
    if (ed.u == ed.v) {
      flag("edge_self_loop", "edge " + id + " is a self-loop");
      graph_ok = false;
    }
    if (!finite(ed.ell) || ed.ell <= 0.0) {
      flag("edge_length_nonpositive", "edge " + id + " has ell <= 0");
      graph_ok = false;
    }
    if (!finite(ed.mu) || ed.mu <= 0.0) {
      flag("edge_measure_nonpositive", "edge " + id + " has mu <= 0");
    }
    if (ed.w < -1 || ed.w > 1) {
      flag("winding_label_out_of_range", "edge " + id + " has w outside {-1,0,1}");
      graph_ok = false;
    }
  }

  for (std::size_t f = 0; f < c.faces.size(); ++f) {
    const Face& face = c.faces[f];
    const std::string id = std::to_string(f);
    if (face.loop.size() < 3 || face.loop.size() > 4) {
      flag("face_size_invalid", "face " + id + " must have 3 or 4 edges");
      continue;
    }
    bool edges_ok = true;
    for (const OrientedEdge& oe : face.loop) {
      if (oe.edge < 0 || oe.edge >= c.edge_count() ||
          (oe.dir != 1 && oe.dir != -1)) {
        flag("face_edge_invalid", "face " + id + " references a bad edge");
        edges_ok = false;
      }
    }
    if (!edges_ok || !graph_ok) continue;
    int wsum = 0;
    bool chained = true;
    for (std::size_t t = 0; t < face.loop.size(); ++t) {
      const OrientedEdge& oe = face.loop[t];
      const OrientedEdge& next = face.loop[(t + 1) % face.loop.size()];
      const Edge& ed = c.edges[oe.edge];
      const VertexId head = oe.dir > 0 ? ed.v : ed.u;
      const Edge& ned = c.edges[next.edge];
      const VertexId next_tail = next.dir > 0 ? ned.u : ned.v;
      if (head != next_tail) chained = false;
      wsum += oe.dir * ed.w;
    }
    if (!chained) {
      flag("face_not_closed", "face " + id + " edges do not chain into a cycle");
    } else if (wsum != 0) {
      flag("face_cocycle_violation",
           "face " + id + " has nonzero winding sum " + std::to_string(wsum));
    }
  }

  if (graph_ok) {
    if (!has_winding_one_cycle(c)) {
      flag("no_winding_one_cycle", "no cycle with winding number 1 exists");
    }
  }
  return report;
}

void validate_or_throw(const ToroidalComplex& c) {
  ValidationReport report = validate(c);
  if (!report.ok()) {
    std::string msg = "complex invalid:";
    for (const Violation& v : report.violations) {
      msg += " [" + v.code + "] " + v.message + ";";
    }
    throw ValidationError(msg);
  }
}

ToroidalComplex scale_metric(const ToroidalComplex& c, double s) {
  if (!(s > 0.0) || !finite(s)) {
    throw InvalidArgumentError("scale_metric: s must be positive");
  }
  ToroidalComplex out = c;
  const double sq = std::pow(s, c.q);
  for (Vertex& v : out.vertices) v.mu *= sq;
  for (Edge& e : out.edges) {
    e.ell *= s;
    e.mu *= sq;
  }
  return out;
}

}  // namespace toromod
