#pragma once
/**
 * \file io.hpp
 * \brief JSON and CSV artifacts: run configuration header, trees, sequences, tables.
 *
 * Integers are decimal strings, rationals "num/den", certified reals a 30-digit
 * midpoint with a width.
 */

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "singvec/best_approx.hpp"
#include "singvec/cantor_tree.hpp"

namespace singvec {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

/** \brief Parameters of one run, written into every artifact. */
struct RunConfig {
  std::string command;
  Json params = Json::object();
  unsigned threads = 1;
  long precision_bits = kDefaultPrecision;
  bool deterministic = true;
  std::optional<std::uint64_t> seed;
};

inline Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["params"] = c.params;
  j["threads"] = c.threads;
  j["precision_bits"] = c.precision_bits;
  j["deterministic"] = c.deterministic;
  j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  return j;
}

/** \brief Artifact header: kind, library version and run configuration. */
inline Json header(const std::string& kind, const RunConfig& c) {
  Json j;
  j["format"] = kind;
  j["version"] = kVersion;
  j["config"] = to_json(c);
  return j;
}

namespace io {

inline Json jint(const Integer& n) { return to_string(n); }
inline Json jrat(const Rational& r) { return to_string(r); }
inline Json jreal(const CertifiedReal& r) {
  return Json{{"value", r.decimal(30)}, {"width", CertifiedReal(r.width()).decimal(6)}};
}
inline Json jvec(const Vec2& v) { return Json::array({jrat(v.a), jrat(v.b)}); }
inline Json jvec3(const IntVec3& v) { return Json::array({jint(v.p1), jint(v.p2), jint(v.q)}); }
template <class T>
Json jopt(const std::optional<T>& v) {
  return v ? jrat(*v) : Json(nullptr);
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field: ") + key);
  return j.at(key);
}
inline std::string str(const Json& j) {
  if (!j.is_string()) throw ParseError("expected a string, got " + j.dump());
  return j.get<std::string>();
}
inline Integer pint(const Json& j) { return parse_integer(str(j)); }
inline Rational prat(const Json& j) { return parse_rational(str(j)); }
inline Vec2 pvec(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a pair");
  return {prat(j[0]), prat(j[1])};
}
inline IntVec3 pvec3(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected an integer triple");
  return {pint(j[0]), pint(j[1]), pint(j[2])};
}
inline std::size_t psize(const Json& j) {
  if (!j.is_number_unsigned()) throw ParseError("expected a nonnegative integer, got " + j.dump());
  return j.get<std::size_t>();
}
inline bool pbool(const Json& j) {
  if (!j.is_boolean()) throw ParseError("expected a boolean, got " + j.dump());
  return j.get<bool>();
}

inline PrimitiveVector pprim(const Json& j) {
  IntVec3 v = pvec3(j);
  try {
    return make_primitive(v);
  } catch (const DomainError& e) {
    throw ParseError(std::string("not a primitive vector: ") + e.what());
  }
}

}  // namespace io

inline Json to_json(const Check& c) {
  Json j{{"name", c.name}, {"ok", c.ok}};
  if (c.exempt) j["exempt"] = true;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

inline Json to_json(const NodeReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return Json{{"node", r.node}, {"ok", r.ok()}, {"checks", checks}};
}

inline Json to_json(const TreeParams& P) {
  Json j;
  j["mu"] = io::jrat(P.mu);
  j["b"] = io::jrat(P.b);
  j["c1"] = io::jopt(P.c1);
  j["c2"] = io::jopt(P.c2);
  j["c3"] = io::jopt(P.c3);
  j["c4"] = io::jopt(P.c4);
  j["min_height"] = io::jint(P.min_height);
  j["band"] = io::jrat(P.band);
  j["tiling_c0"] = io::jrat(P.tiling_c0);
  return j;
}

inline TreeParams tree_params_from_json(const Json& j) {
  TreeParams P = make_tree_params(io::prat(io::field(j, "mu")), io::prat(io::field(j, "b")));
  auto opt = [&](const char* k) -> std::optional<Rational> {
    const Json& v = io::field(j, k);
    if (v.is_null()) return std::nullopt;
    return io::prat(v);
  };
  P.c1 = opt("c1");
  P.c2 = opt("c2");
  P.c3 = opt("c3");
  P.c4 = opt("c4");
  P.min_height = io::pint(io::field(j, "min_height"));
  P.band = io::prat(io::field(j, "band"));
  P.tiling_c0 = io::prat(io::field(j, "tiling_c0"));
  return P;
}

inline Json to_json(const TreeNode& n) {
  Json j;
  j["id"] = n.id;
  j["x"] = io::jvec3(n.x.vec());
  j["parent"] = n.parent ? Json(*n.parent) : Json(nullptr);
  j["depth"] = n.depth;
  j["radius"] = io::jrat(n.radius);
  j["packing_radius"] = io::jrat(n.packing_radius);
  j["lam1_sq"] = io::jrat(n.lattice.lam1_sq);
  j["bootstrap"] = n.bootstrap;
  j["truncated"] = n.truncated;
  j["children"] = n.children;
  if (n.witness) {
    const Witness& w = *n.witness;
    j["witness"] = Json{{"y", io::jvec3(w.y.vec())}, {"alpha", io::jvec(w.alpha)}, {"m", io::jint(w.m)},
                        {"k", io::jint(w.k)},        {"lift", io::jvec3(w.lift)},  {"a", io::jint(w.a)},
                        {"kz", io::jint(w.kz)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

/** \brief Tree file: header, parameters, options, calibration, nodes and stored reports. */
inline Json to_json(const Tree& t, const RunConfig& cfg) {
  Json j = header("singvec-tree", cfg);
  j["params"] = to_json(t.params);
  j["options"] = Json{{"depth", t.options.depth}, {"cap", t.options.cap}, {"budget", t.options.budget}};
  Json cal = Json::array();
  for (const auto& [name, v] : t.calibration.bounds) cal.push_back(Json{{"name", name}, {"bound", io::jreal(v)}});
  j["calibration"] = cal;
  Json nodes = Json::array();
  for (const auto& n : t.nodes) nodes.push_back(to_json(n));
  j["nodes"] = nodes;
  Json reps = Json::array();
  for (const auto& r : t.node_reports) reps.push_back(to_json(r));
  j["node_reports"] = reps;
  Json fams = Json::array();
  for (const auto& r : t.family_reports) fams.push_back(to_json(r));
  j["family_reports"] = fams;
  return j;
}

/**
 * \brief Reads a tree file. Lattices are recomputed; structural inconsistencies raise
 * ParseError. Stored reports are not loaded.
 */
inline Tree tree_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != "singvec-tree") throw ParseError("not a tree file");
  Tree t;
  t.params = tree_params_from_json(io::field(j, "params"));
  const Json& o = io::field(j, "options");
  t.options.depth = io::psize(io::field(o, "depth"));
  t.options.cap = io::psize(io::field(o, "cap"));
  t.options.budget = io::psize(io::field(o, "budget"));
  const Json& nodes = io::field(j, "nodes");
  if (!nodes.is_array() || nodes.empty()) throw ParseError("tree has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Json& nj = nodes[i];
    TreeNode n;
    n.id = io::psize(io::field(nj, "id"));
    if (n.id != i) throw ParseError("node ids are not consecutive");
    n.x = io::pprim(io::field(nj, "x"));
    n.lattice = farey_lattice(n.x);
    const Json& p = io::field(nj, "parent");
    if (!p.is_null()) {
      n.parent = io::psize(p);
      if (*n.parent >= i) throw ParseError("parent id must precede the node");
    } else if (i != 0) {
      throw ParseError("only node 0 may lack a parent");
    }
    n.depth = io::psize(io::field(nj, "depth"));
    n.radius = io::prat(io::field(nj, "radius"));
    n.packing_radius = io::prat(io::field(nj, "packing_radius"));
    n.bootstrap = io::pbool(io::field(nj, "bootstrap"));
    n.truncated = io::pbool(io::field(nj, "truncated"));
    for (const Json& c : io::field(nj, "children")) n.children.push_back(io::psize(c));
    const Json& w = io::field(nj, "witness");
    if (!w.is_null()) {
      Witness wt;
      wt.y = io::pprim(io::field(w, "y"));
      wt.alpha = io::pvec(io::field(w, "alpha"));
      wt.m = io::pint(io::field(w, "m"));
      wt.k = io::pint(io::field(w, "k"));
      wt.lift = io::pvec3(io::field(w, "lift"));
      wt.a = io::pint(io::field(w, "a"));
      wt.kz = io::pint(io::field(w, "kz"));
      n.witness = wt;
    }
    t.nodes.push_back(std::move(n));
  }
  for (const auto& n : t.nodes) {
    for (std::size_t c : n.children) {
      if (c >= t.nodes.size() || t.nodes[c].parent != n.id) throw ParseError("children and parent ids disagree");
      if (t.nodes[c].depth != n.depth + 1) throw ParseError("child depth mismatch");
    }
  }
  return t;
}

inline Json to_json(const BestApproxSequence& s) {
  Json recs = Json::array();
  for (const auto& r : s.records) {
    recs.push_back(Json{{"q", io::jint(r.x.q())}, {"p1", io::jint(r.x.p1())}, {"p2", io::jint(r.x.p2())},
                        {"rn_sq", io::jrat(r.rn_sq)}});
  }
  return Json{{"theta", Json{{"center", io::jvec(s.theta.center)}, {"radius", io::jrat(s.theta.radius)}}},
              {"qmax", io::jint(s.qmax)},
              {"terminal", s.terminal},
              {"records", recs}};
}

inline Json to_json(const Bai3Report& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) v.push_back(Json{{"check", x.check}, {"n", x.n}, {"other", x.other}});
  return Json{{"checked", r.checked}, {"clean", r.clean()}, {"violations", v}};
}

/** \brief Writes text to a file; "-" means standard output. */
inline void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw DomainError("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline Json read_json(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

/** \brief CSV table with "#" header lines carrying the version and run configuration. */
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render(const RunConfig& cfg) const {
    std::ostringstream s;
    s << "# singvec " << kVersion << "\n";
    s << "# config " << to_json(cfg).dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) s << (i ? "," : "") << columns[i];
    s << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << r[i];
      s << "\n";
    }
    return s.str();
  }
};

/** \brief Midpoint and width columns of a certified value. */
inline std::vector<std::string> csv_real(const CertifiedReal& r) {
  return {r.decimal(30), CertifiedReal(r.width()).decimal(6)};
}

}  // namespace singvec
