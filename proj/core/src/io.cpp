#include "toromod/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "json.hpp"

namespace toromod {

namespace {

using nlohmann::json;

json meta_to_json(const std::string& meta) {
  if (meta.empty()) return json::object();
  json parsed = json::parse(meta, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) return json(meta);  // keep free-form meta as a string
  return parsed;
}

double require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw ParseError(std::string("non-finite value in field '") + what + "'");
  }
  return x;
}

}  // namespace

void save_complex(const ToroidalComplex& c, std::ostream& sink) {
  json doc;
  doc["q"] = require_finite(c.q, "q");
  doc["meta"] = meta_to_json(c.meta);
  json vertices = json::array();
  for (std::size_t v = 0; v < c.vertices.size(); ++v) {
    vertices.push_back({{"id", v}, {"mu", require_finite(c.vertices[v].mu, "vertex mu")}});
  }
  doc["vertices"] = std::move(vertices);
  json edges = json::array();
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Edge& ed = c.edges[e];
    edges.push_back({{"id", e},
                     {"u", ed.u},
                     {"v", ed.v},
                     {"ell", require_finite(ed.ell, "ell")},
                     {"mu", require_finite(ed.mu, "edge mu")},
                     {"w", ed.w}});
  }
  doc["edges"] = std::move(edges);
  json faces = json::array();
  for (const Face& f : c.faces) {
    json loop = json::array();
    for (const OrientedEdge& oe : f.loop) {
      loop.push_back({{"edge", oe.edge}, {"dir", oe.dir}});
    }
    faces.push_back(std::move(loop));
  }
  doc["faces"] = std::move(faces);
  sink << doc.dump(2) << "\n";
}

void save_complex(const ToroidalComplex& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_complex(c, out);
  if (!out) throw Error("write to '" + path + "' failed");
}

ToroidalComplex load_complex(std::istream& source) {
  ToroidalComplex c = load_complex_unchecked(source);
  validate_or_throw(c);
  return c;
}

ToroidalComplex load_complex(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return load_complex(in);
}

ToroidalComplex load_complex_unchecked(std::istream& source) {
  json doc = json::parse(source, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ParseError("malformed JSON complex document");

  ToroidalComplex c;
  try {
    c.q = doc.at("q").get<double>();
    if (doc.contains("meta")) {
      const json& meta = doc.at("meta");
      c.meta = meta.is_string() ? meta.get<std::string>() : meta.dump();
    }
    const json& vertices = doc.at("vertices");
    c.vertices.resize(vertices.size());
    for (const json& jv : vertices) {
      const auto id = jv.at("id").get<std::size_t>();
      if (id >= c.vertices.size()) throw ParseError("vertex id out of range");
      c.vertices[id].mu = jv.at("mu").get<double>();
    }
    const json& edges = doc.at("edges");
    c.edges.resize(edges.size());
    for (const json& je : edges) {
      const auto id = je.at("id").get<std::size_t>();
      if (id >= c.edges.size()) throw ParseError("edge id out of range");
      Edge& e = c.edges[id];
      e.u = je.at("u").get<VertexId>();
      e.v = je.at("v").get<VertexId>();
      e.ell = je.at("ell").get<double>();
      e.mu = je.at("mu").get<double>();
      e.w = je.at("w").get<int>();
    }
    for (const json& jf : doc.at("faces")) {
      Face face;
      for (const json& joe : jf) {
        face.loop.push_back({joe.at("edge").get<EdgeId>(), joe.at("dir").get<int>()});
      }
      c.faces.push_back(std::move(face));
    }
  } catch (const json::exception& ex) {
    throw ParseError(std::string("bad complex document: ") + ex.what());
  }

  c.rebuild_adjacency();
  return c;
}

ToroidalComplex load_complex_unchecked(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return load_complex_unchecked(in);
}

}  // namespace toromod
