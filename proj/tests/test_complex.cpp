#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "toromod/complex.hpp"
#include "toromod/covering.hpp"
#include "toromod/io.hpp"

using namespace toromod;
using namespace toromod::testing;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("build_ring produces the degenerate solid torus") {
  const ToroidalComplex c = build_ring(3, 1.0, 1.0);
  REQUIRE(c.vertex_count() == 3);
  REQUIRE(c.edge_count() == 3);
  int w_sum = 0;
  for (EdgeId e = 0; e < 3; ++e) {
    CHECK(c.edges[e].ell == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(c.edges[e].mu == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(c.h(e) == doctest::Approx(1.0).epsilon(1e-15));
    w_sum += c.edges[e].w;
  }
  CHECK(w_sum == 1);
  for (const Vertex& v : c.vertices) CHECK(v.mu == 0.0);

  const ToroidalComplex c2 = build_ring(4, 2.0, 1.0);
  for (EdgeId e = 0; e < 4; ++e) {
    CHECK(c2.edges[e].ell == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c2.edges[e].mu == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c2.h(e) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("build_ring rejects bad parameters") {
  CHECK_THROWS_AS(build_ring(2, 1.0, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS(build_ring(3, 0.0, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS(build_ring(3, 1.0, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(build_ring(3, -1.0, 1.0), InvalidArgumentError);
}

TEST_CASE("flat solid torus carries the continuum volume") {
  const ToroidalComplex c = build_solid_torus(16, 3, 8, 1.0, 1.0);
  CHECK(close_rel(c.total_edge_measure(), kPi, 0.02));
  // The polar dual areas tile the disk, so the total is exact here.
  CHECK(c.total_edge_measure() == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("minimal solid torus validates and has a winding cycle") {
  const ToroidalComplex c = build_solid_torus(3, 1, 3, 1.0, 1.0);
  CHECK(validate(c).ok());
  CHECK(has_winding_one_cycle(c));
}

TEST_CASE("warped volume matches quadrature") {
  const WarpFn warp = make_warp("sin:0.5");
  const ToroidalComplex c = build_solid_torus(16, 3, 8, 1.0, 1.0, warp);
  const double want =
      kPi * 1.0 / (2.0 * kPi) *
      simpson([](double th) { return std::pow(1.0 + 0.5 * std::sin(th), 3.0); }, 0.0,
              2.0 * kPi, 4096);
  CHECK(close_rel(c.total_edge_measure(), want, 0.02));
}

TEST_CASE("warp must stay positive") {
  const WarpFn bad = [](double, double, double) { return -1.0; };
  CHECK_THROWS_AS(build_solid_torus(4, 1, 3, 1.0, 1.0, bad), InvalidArgumentError);
  CHECK_THROWS_AS(make_warp("sin:1.5"), InvalidArgumentError);
  CHECK_THROWS_AS(make_warp("spiral"), InvalidArgumentError);
}

TEST_CASE("validate reports specific violations") {
  ToroidalComplex c = build_ring(3, 1.0, 1.0);
  CHECK(validate(c).ok());

  SUBCASE("flipping the crossing label kills the winding class") {
    for (Edge& e : c.edges) e.w = 0;
    const ValidationReport report = validate(c);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].code == "no_winding_one_cycle");
  }
  SUBCASE("zero length is a positivity violation") {
    c.edges[1].ell = 0.0;
    const ValidationReport report = validate(c);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const Violation& v : report.violations) {
      found = found || v.code == "edge_length_nonpositive";
    }
    CHECK(found);
  }
  SUBCASE("face cocycle violations are caught") {
    ToroidalComplex t = make_tube(3);
    t.edges[0].w = 1;  // a second crossing on rail A only
    const ValidationReport report = validate(t);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const Violation& v : report.violations) {
      found = found || v.code == "face_cocycle_violation";
    }
    CHECK(found);
  }
}

TEST_CASE("scale_metric follows the exponent laws") {
  const ToroidalComplex c = build_ring(3, 1.0, 1.0);
  SUBCASE("identity at s = 1") {
    const ToroidalComplex s = scale_metric(c, 1.0);
    for (EdgeId e = 0; e < 3; ++e) {
      CHECK(s.edges[e].ell == c.edges[e].ell);
      CHECK(s.edges[e].mu == c.edges[e].mu);
    }
  }
  SUBCASE("s = 2, q = 3") {
    const ToroidalComplex s = scale_metric(c, 2.0);
    for (EdgeId e = 0; e < 3; ++e) {
      CHECK(s.edges[e].ell == doctest::Approx(2.0 / 3).epsilon(1e-15));
      CHECK(s.edges[e].mu == doctest::Approx(8.0 / 3).epsilon(1e-15));
      CHECK(s.h(e) == doctest::Approx(4.0).epsilon(1e-15));
    }
  }
  SUBCASE("scaling composes and inverts") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.3, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double s1 = uni(rng), s2 = uni(rng);
      const ToroidalComplex a = scale_metric(scale_metric(c, s1), s2);
      const ToroidalComplex b = scale_metric(c, s1 * s2);
      for (EdgeId e = 0; e < 3; ++e) {
        CHECK(close_rel(a.edges[e].ell, b.edges[e].ell, 1e-12));
        CHECK(close_rel(a.edges[e].mu, b.edges[e].mu, 1e-12));
      }
      const ToroidalComplex inv = scale_metric(scale_metric(c, s1), 1.0 / s1);
      for (EdgeId e = 0; e < 3; ++e) {
        CHECK(close_rel(inv.edges[e].ell, c.edges[e].ell, 1e-12));
        CHECK(close_rel(inv.edges[e].mu, c.edges[e].mu, 1e-12));
      }
    }
  }
  SUBCASE("nonpositive scale is rejected") {
    CHECK_THROWS_AS(scale_metric(c, 0.0), InvalidArgumentError);
    CHECK_THROWS_AS(scale_metric(c, -2.0), InvalidArgumentError);
  }
}

TEST_CASE("builders validate over random legal parameters") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> m_dist(3, 12);
  std::uniform_real_distribution<double> pos(0.2, 4.0);
  for (int trial = 0; trial < 15; ++trial) {
    CHECK(validate(build_ring(m_dist(rng), pos(rng), pos(rng))).ok());
  }
  std::uniform_int_distribution<int> k_dist(3, 8), nr_dist(1, 3), np_dist(3, 6);
  for (int trial = 0; trial < 6; ++trial) {
    CHECK(validate(build_solid_torus(k_dist(rng), nr_dist(rng), np_dist(rng), pos(rng),
                                     pos(rng)))
              .ok());
  }
}

TEST_CASE("complex persistence round-trips exactly") {
  for (const ToroidalComplex& c :
       {build_ring(3, 1.0, 1.0), build_solid_torus(4, 2, 4, 1.5, 0.7, make_warp("sin:0.25"))}) {
    std::stringstream buf;
    save_complex(c, buf);
    const ToroidalComplex back = load_complex(buf);
    REQUIRE(back.vertex_count() == c.vertex_count());
    REQUIRE(back.edge_count() == c.edge_count());
    REQUIRE(back.faces.size() == c.faces.size());
    CHECK(back.q == c.q);
    for (int v = 0; v < c.vertex_count(); ++v) CHECK(back.vertices[v].mu == c.vertices[v].mu);
    for (EdgeId e = 0; e < c.edge_count(); ++e) {
      CHECK(back.edges[e].u == c.edges[e].u);
      CHECK(back.edges[e].v == c.edges[e].v);
      CHECK(back.edges[e].ell == c.edges[e].ell);
      CHECK(back.edges[e].mu == c.edges[e].mu);
      CHECK(back.edges[e].w == c.edges[e].w);
    }
    for (std::size_t f = 0; f < c.faces.size(); ++f) {
      REQUIRE(back.faces[f].loop.size() == c.faces[f].loop.size());
      for (std::size_t t = 0; t < c.faces[f].loop.size(); ++t) {
        CHECK(back.faces[f].loop[t].edge == c.faces[f].loop[t].edge);
        CHECK(back.faces[f].loop[t].dir == c.faces[f].loop[t].dir);
      }
    }
  }
}

TEST_CASE("loading rejects malformed and invalid documents") {
  std::stringstream buf;
  save_complex(build_ring(3, 1.0, 1.0), buf);
  const std::string text = buf.str();

  SUBCASE("truncated file") {
    std::stringstream cut(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(load_complex(cut), ParseError);
  }
  SUBCASE("negative edge measure") {
    std::string bad = text;
    const auto pos = bad.find("\"mu\": 0.3333");
    REQUIRE(pos != std::string::npos);
    bad.insert(pos + 6, "-");
    std::stringstream in(bad);
    CHECK_THROWS_AS(load_complex(in), ValidationError);
  }
  SUBCASE("not JSON at all") {
    std::stringstream in("ceci n'est pas un complexe");
    CHECK_THROWS_AS(load_complex(in), ParseError);
  }
}
