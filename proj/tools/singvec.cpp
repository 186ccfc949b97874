/**
 * \file singvec.cpp
 * \brief Command-line front end: lattice, bestapprox, formulas, tree, singular, dim.
 *
 * Exit codes: 0 success, 1 domain error or failed check, 2 parse error.
 */

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "singvec/dimension_lab.hpp"
#include "singvec/io.hpp"

using namespace singvec;

namespace {

/** \brief Check result raised by a command after its artifacts are written. */
struct Failed {
  std::string what;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

IntVec3 parse_triple(const std::string& s) {
  auto p = split(s, ',');
  if (p.size() != 3) throw ParseError("expected p1,p2,q: " + s);
  return {parse_integer(p[0]), parse_integer(p[1]), parse_integer(p[2])};
}

Vec2 parse_pair(const std::string& s) {
  auto p = split(s, ',');
  if (p.size() != 2) throw ParseError("expected a,b: " + s);
  return {parse_rational(p[0]), parse_rational(p[1])};
}

Rational resolve_b(const std::string& s, const Rational& mu) {
  if (s == "auto") return resolve_b_auto(mu);
  return parse_rational(s);
}

/** \brief "s1" resolves to s1(mu, b) of the tree, anything else is a rational. */
Rational resolve_s(const std::string& s, const TreeParams& P) {
  if (s == "s1") return s1(P.mu, P.b);
  return parse_rational(s);
}

/** \brief "lo:hi:step" or a single value. */
std::vector<Rational> parse_mu_range(const std::string& s) {
  auto p = split(s, ':');
  if (p.size() == 1) return {parse_rational(p[0])};
  if (p.size() != 3) throw ParseError("expected lo:hi:step: " + s);
  Rational lo = parse_rational(p[0]), hi = parse_rational(p[1]), step = parse_rational(p[2]);
  if (!(step > 0)) throw ParseError("step must be positive");
  std::vector<Rational> out;
  for (Rational m = lo; m <= hi; m += step) out.push_back(m);
  return out;
}

/** \brief "2^-4..2^-20" or "4..20": box side exponents k with side 2^-k. */
std::vector<long> parse_scales(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) throw ParseError("expected a..b scales: " + s);
  auto one = [](std::string t) -> long {
    if (t.rfind("2^", 0) == 0) t = t.substr(2);
    Integer v = parse_integer(t);
    if (!v.fits_slong_p()) throw ParseError("scale out of range: " + t);
    long k = v.get_si();
    return k < 0 ? -k : k;
  };
  long a = one(s.substr(0, dots)), b = one(s.substr(dots + 2));
  if (a > b) std::swap(a, b);
  if (b > 4096) throw ParseError("scale exponent too large");
  std::vector<long> out;
  for (long k = a; k <= b; ++k) out.push_back(k);
  return out;
}

Json triple_json(const PrimitiveVector& x) { return io::jvec3(x.vec()); }

std::string fmt(const CertifiedReal& r, int digits = 12) { return r.decimal(digits); }

/** \brief Collects option values (given or default) of a subcommand into the run configuration. */
RunConfig make_config(const std::string& command, const CLI::App* sub, const CLI::App* root) {
  RunConfig c;
  c.command = command;
  for (const CLI::App* a : {root, sub}) {
    for (const CLI::Option* o : a->get_options()) {
      if (o->get_lnames().empty()) continue;
      const std::string& name = o->get_lnames().front();
      if (name == "help") continue;
      if (o->get_type_size() == 0) {
        c.params[name] = o->count() > 0;
      } else if (o->count() > 0) {
        c.params[name] = o->as<std::string>();
      } else if (!o->get_default_str().empty()) {
        c.params[name] = o->get_default_str();
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// lattice

int cmd_lattice_minima(const std::string& xs, const std::string& json_path, const RunConfig& cfg) {
  PrimitiveVector x = make_primitive(parse_triple(xs));
  FareyLattice L = farey_lattice(x);
  Rational covol = abs(det(L.u1, L.u2));
  Rational q = x.q();
  bool covol_ok = covol == 1 / q;
  bool reduced = L.lam1_sq <= L.lam2_sq && 2 * abs(dot(L.u1, L.u2)) <= L.lam1_sq;
  bool minkowski = 3 * L.lam1_sq * L.lam2_sq <= 4 * covol * covol;
  std::cout << "x        " << x << "\n";
  std::cout << "u1       " << L.u1 << "\n";
  std::cout << "u2       " << L.u2 << "\n";
  std::cout << "lam1_sq  " << to_string(L.lam1_sq) << "\n";
  std::cout << "lam2_sq  " << to_string(L.lam2_sq) << "\n";
  std::cout << "covolume " << to_string(covol) << (covol_ok ? " ok" : " MISMATCH") << "\n";
  std::cout << "reduced  " << (reduced ? "ok" : "FAIL") << "\n";
  std::cout << "minkowski " << (minkowski ? "ok" : "FAIL") << "\n";
  if (!json_path.empty()) {
    Json j = header("singvec-lattice", cfg);
    j["x"] = triple_json(x);
    j["u1"] = io::jvec(L.u1);
    j["u2"] = io::jvec(L.u2);
    j["lam1_sq"] = io::jrat(L.lam1_sq);
    j["lam2_sq"] = io::jrat(L.lam2_sq);
    j["covolume"] = io::jrat(covol);
    j["checks"] = Json{{"covolume", covol_ok}, {"reduced", reduced}, {"minkowski", minkowski}};
    write_json(json_path, j);
  }
  if (!(covol_ok && reduced && minkowski)) throw Failed{"lattice checks"};
  return 0;
}

// ---------------------------------------------------------------------------
// bestapprox

int cmd_bestapprox(const std::string& theta_s, const std::string& radius_s, const std::string& qmax_s,
                   const std::string& json_path, bool bai3, const RunConfig& cfg) {
  Vec2 c = parse_pair(theta_s);
  Rational rho = parse_rational(radius_s);
  Integer qmax = parse_integer(qmax_s);
  TargetPoint theta = rho == 0 ? TargetPoint::exact(c) : TargetPoint::enclosure(c, rho);
  BestApproxSequence seq = best_sequence(theta, qmax);
  std::cout << "n,q,p1,p2,rn_sq\n";
  for (std::size_t n = 0; n < seq.records.size(); ++n) {
    const auto& r = seq.records[n];
    std::cout << n << "," << r.x.q() << "," << r.x.p1() << "," << r.x.p2() << "," << to_string(r.rn_sq) << "\n";
  }
  if (seq.terminal) std::cout << "terminal: theta is reached exactly\n";
  Json j = header("singvec-bestapprox", cfg);
  j["sequence"] = to_json(seq);
  bool ok = true;
  if (bai3) {
    Bai3Report rep = verify_bai3(seq);
    j["bai3"] = to_json(rep);
    std::cout << "bai3 checked=" << rep.checked << " violations=" << rep.violations.size() << "\n";
    ok = rep.clean();
  }
  if (!json_path.empty()) write_json(json_path, j);
  if (!ok) throw Failed{"record-structure violations"};
  return 0;
}

// ---------------------------------------------------------------------------
// formulas

int cmd_formulas_table(const std::string& mu_s, const std::string& out, const RunConfig& cfg) {
  CsvTable T;
  T.columns = {"mu",          "upper",      "upper_width", "lower",    "lower_width", "packing",
               "packing_width", "packing_attained", "b0", "b0_width", "gamma",       "tau",
               "tau_width"};
  for (const Rational& mu : parse_mu_range(mu_s)) {
    FormulaRow r = formula_row(mu);
    std::vector<std::string> row = {CertifiedReal(mu).decimal(30)};
    for (const CertifiedReal* v : {&r.upper, &r.lower, &r.packing}) {
      auto cols = csv_real(*v);
      row.insert(row.end(), cols.begin(), cols.end());
    }
    row.push_back(r.packing_attained ? "true" : "false");
    if (r.b0) {
      auto cols = csv_real(*r.b0);
      row.insert(row.end(), cols.begin(), cols.end());
    } else {
      row.insert(row.end(), {"", ""});
    }
    row.push_back(r.gamma ? CertifiedReal(*r.gamma).decimal(30) : "");
    auto tc = csv_real(r.tau);
    row.insert(row.end(), tc.begin(), tc.end());
    T.rows.push_back(row);
  }
  write_text(out, T.render(cfg));
  return 0;
}

// ---------------------------------------------------------------------------
// tree

struct TreeArgs {
  std::string mu = "0.6", b = "auto", root = "1,0,2", out, csv;
  std::size_t depth = 3, cap = 8, budget = 100000;
};

Tree build_from(const TreeArgs& a, unsigned threads) {
  Rational mu = parse_rational(a.mu);
  Rational b = resolve_b(a.b, mu);
  BuildOptions o;
  o.depth = a.depth;
  o.cap = a.cap;
  o.budget = a.budget;
  o.threads = threads;
  o.strict = false;
  return build_tree(make_primitive(parse_triple(a.root)), make_tree_params(mu, b), o);
}

void print_levels(const Tree& t) {
  for (std::size_t d = 0; d <= t.depth(); ++d) {
    auto ids = t.level(d);
    std::size_t bits = 0;
    for (auto id : ids) bits = std::max(bits, bit_length(t.nodes[id].x.q()));
    std::cout << "depth " << d << ": " << ids.size() << " nodes, height bits <= " << bits << "\n";
  }
}

int cmd_tree_build(const TreeArgs& a, const RunConfig& cfg) {
  Tree t = build_from(a, cfg.threads);
  std::cout << "mu=" << to_string(t.params.mu) << " b=" << to_string(t.params.b) << "\n";
  print_levels(t);
  write_json(a.out, to_json(t, cfg));
  if (!a.csv.empty()) {
    CsvTable T;
    T.columns = {"id", "depth", "height", "lam1_sq", "radius", "card_sigma_lo", "card_sigma_hi"};
    for (const auto& n : t.nodes) {
      std::vector<std::string> row = {std::to_string(n.id), std::to_string(n.depth), to_string(n.x.q()),
                                      to_string(n.lattice.lam1_sq), to_string(n.radius)};
      try {
        CardEnclosure e = card_sigma(n, t.params);
        row.push_back(e.lo.decimal(30));
        row.push_back(e.hi.decimal(30));
      } catch (const Error&) {
        row.insert(row.end(), {"", ""});
      }
      T.rows.push_back(row);
    }
    write_text(a.csv, T.render(cfg));
  }
  std::size_t bad = 0;
  for (const auto& r : t.node_reports) bad += r.ok() ? 0 : 1;
  for (const auto& r : t.family_reports) bad += r.ok() ? 0 : 1;
  std::cout << "checks: " << (t.ok() ? "all passed" : std::to_string(bad) + " reports with failures") << "\n";
  if (!t.ok()) throw Failed{"tree checks"};
  return 0;
}

struct VerifyArgs {
  std::string in, checks = "nestedness,family,disjoint,tiling,counting", report, s = "s1";
  std::size_t scene_depth = 0, cell_limit = 512, radii = 5;
};

int cmd_tree_verify(const VerifyArgs& a, const RunConfig& cfg) {
  Tree t = tree_from_json(read_json(a.in));
  std::set<std::string> want;
  for (const auto& c : split(a.checks, ',')) {
    if (c == "all") {
      want = {"nestedness", "family", "disjoint", "tiling", "counting"};
      continue;
    }
    if (c != "nestedness" && c != "family" && c != "disjoint" && c != "tiling" && c != "counting") {
      throw ParseError("unknown check: " + c);
    }
    want.insert(c);
  }
  Json rep = header("singvec-tree-report", cfg);
  Json sections = Json::object();
  bool all_ok = true;
  auto section = [&](const std::string& name, const std::vector<NodeReport>& reps) {
    Json arr = Json::array();
    std::size_t bad = 0;
    for (const auto& r : reps) {
      arr.push_back(to_json(r));
      if (!r.ok()) ++bad;
    }
    sections[name] = Json{{"ok", bad == 0}, {"reports", arr}};
    std::cout << name << ": " << reps.size() << " reports, " << bad << " with failures\n";
    all_ok = all_ok && bad == 0;
  };
  std::vector<std::size_t> interior;
  for (const auto& n : t.nodes) {
    if (!n.children.empty()) interior.push_back(n.id);
  }
  if (want.count("nestedness")) {
    std::vector<NodeReport> reps;
    for (const auto& n : t.nodes) reps.push_back(verify_node(t, n.id));
    section("nestedness", reps);
  }
  if (want.count("family")) {
    std::vector<NodeReport> reps;
    for (auto id : interior) reps.push_back(certify_family(t.nodes[id], family_data(t.nodes[id], t.params), t.params));
    section("family", reps);
  }
  if (want.count("disjoint")) {
    std::vector<NodeReport> reps;
    for (auto id : interior) reps.push_back(verify_siblings(t, id));
    section("disjoint", reps);
  }
  if (want.count("tiling")) {
    std::vector<NodeReport> reps;
    for (auto id : interior) reps.push_back(tiling(t.nodes[id], t.params, a.cell_limit).checks);
    section("tiling", reps);
  }
  if (want.count("counting")) {
    Rational s = resolve_s(a.s, t.params);
    std::vector<NodeReport> reps;
    Json profiles = Json::array();
    for (auto id : interior) {
      if (t.nodes[id].depth > a.scene_depth) continue;
      CountingScene S = make_scene(t.nodes[id], t.params);
      ProfileReport pr = counting_profile(S, s, radius_grid(S, a.radii));
      NodeReport r = pr.hypotheses;
      r.node = id;
      for (const auto& row : pr.rows) r.add("count_at_r=" + to_string(row.r), row.ok);
      reps.push_back(r);
    }
    section("counting", reps);
  }
  rep["ok"] = all_ok;
  rep["sections"] = sections;
  if (!a.report.empty()) write_json(a.report, rep);
  std::cout << (all_ok ? "all checks passed" : "some checks failed") << "\n";
  if (!all_ok) throw Failed{"tree verification"};
  return 0;
}

// ---------------------------------------------------------------------------
// singular

struct GenerateArgs {
  TreeArgs tree;
  std::string path, out;
};

int cmd_singular_generate(GenerateArgs a, const RunConfig& cfg) {
  Tree t;
  try {
    t = build_from(a.tree, cfg.threads);
  } catch (const HeightTooSmall& e) {
    std::cerr << "HeightTooSmall: " << e.what()
              << "\nthe root height admits no certified children at these parameters; raise the root height"
                 " or lower mu\n";
    return 1;
  }
  if (!t.ok()) {
    std::cerr << "tree checks failed; run tree build for the report\n";
    return 1;
  }
  std::vector<std::size_t> path = {0};
  std::vector<std::size_t> choice;
  if (!a.path.empty()) {
    for (const auto& s : split(a.path, ',')) choice.push_back(static_cast<std::size_t>(parse_integer(s).get_ui()));
  }
  for (std::size_t i = 0; !t.nodes[path.back()].children.empty(); ++i) {
    const auto& ch = t.nodes[path.back()].children;
    std::size_t k = i < choice.size() ? choice[i] : 0;
    if (k >= ch.size()) throw DomainError("path index out of range at depth " + std::to_string(i));
    path.push_back(ch[k]);
  }
  TargetPoint theta = extract_point(t, path);
  Json j = header("singvec-theta", cfg);
  j["params"] = to_json(t.params);
  j["theta"] = Json{{"center", io::jvec(theta.center)}, {"radius", io::jrat(theta.radius)}};
  Json pj = Json::array();
  for (auto id : path) {
    const auto& n = t.nodes[id];
    pj.push_back(Json{{"id", id}, {"depth", n.depth}, {"x", triple_json(n.x)}, {"radius", io::jrat(n.radius)}});
  }
  j["path"] = pj;
  write_json(a.out, j);
  std::cout << "path depth " << path.size() - 1 << ", enclosure radius 2^-"
            << bit_length(theta.radius.get_den()) - 1 << "\n";
  return 0;
}

struct SingularVerifyArgs {
  std::string in, theta, radius = "0", mu, qmax = "auto", qmin = "auto", json;
  std::size_t n_from = 2;
};

int cmd_singular_verify(const SingularVerifyArgs& a, const RunConfig& cfg) {
  Rational mu = parse_rational(a.mu);
  require_mu(mu);
  TargetPoint theta;
  std::vector<Integer> heights;
  if (!a.in.empty()) {
    Json j = read_json(a.in);
    const Json& th = io::field(j, "theta");
    Vec2 c = io::pvec(io::field(th, "center"));
    Rational r = io::prat(io::field(th, "radius"));
    theta = r == 0 ? TargetPoint::exact(c) : TargetPoint::enclosure(c, r);
    if (j.contains("path")) {
      for (const Json& n : j["path"]) heights.push_back(io::pvec3(io::field(n, "x")).q);
    }
  } else if (!a.theta.empty()) {
    Rational r = parse_rational(a.radius);
    Vec2 c = parse_pair(a.theta);
    theta = r == 0 ? TargetPoint::exact(c) : TargetPoint::enclosure(c, r);
  } else {
    throw ParseError("one of --in or --theta is required");
  }
  Integer qmax;
  if (a.qmax == "auto") {
    if (heights.size() < 2) throw ParseError("--qmax auto needs a path with at least two nodes");
    qmax = heights[heights.size() - 2];
  } else {
    qmax = parse_integer(a.qmax);
  }
  BestApproxSequence seq = best_sequence(theta, qmax);
  Integer qmin;
  if (a.qmin == "auto") {
    if (heights.size() > 2) {
      qmin = heights[std::min<std::size_t>(2, heights.size() - 2)];
    } else if (seq.records.size() > a.n_from) {
      qmin = seq.records[a.n_from].x.q();
    } else {
      qmin = seq.records.back().x.q();
    }
  } else {
    qmin = parse_integer(a.qmin);
  }
  if (qmin > qmax) throw DomainError("qmin exceeds qmax");
  bool degenerate = seq.terminal || theta.is_exact();
  auto wit = singular_witness(seq, mu, a.n_from, seq.records.size());
  bool wit_ok = !wit.empty();
  for (const auto& w : wit) wit_ok = wit_ok && w.ok();
  UniformBoundReport ub = uniform_bound_check(seq, mu, qmin, qmax);
  std::vector<Integer> grid;
  for (const auto& r : seq.records) {
    if (r.x.q() >= qmin && r.x.q() <= qmax) grid.push_back(r.x.q());
  }
  auto prof = exponent_profile(seq, grid);

  Json j = header("singvec-singular-report", cfg);
  j["sequence"] = to_json(seq);
  Json wj = Json::array();
  for (const auto& w : wit) {
    wj.push_back(Json{{"n", w.n},
                      {"lambda1_ok", w.lambda1_ok},
                      {"middle_lower_ok", w.middle_lower_ok},
                      {"middle_upper_ok", w.middle_upper_ok}});
  }
  j["witness"] = wj;
  j["uniform"] = Json{{"ok", ub.ok},
                      {"qmin", io::jint(qmin)},
                      {"qmax", io::jint(qmax)},
                      {"segments", ub.segments},
                      {"first_failure", ub.first_failure ? io::jint(*ub.first_failure) : Json(nullptr)}};
  Json pj = Json::array();
  for (const auto& r : prof) {
    pj.push_back(Json{{"Q", io::jint(r.Q)},
                      {"best_dist_sq", io::jrat(r.best_dist_sq)},
                      {"estimate", r.estimate ? io::jreal(*r.estimate) : Json(nullptr)},
                      {"infinite", r.infinite}});
  }
  j["profile"] = pj;
  j["degenerate"] = degenerate;
  bool ok = wit_ok && ub.ok && !degenerate;
  j["ok"] = ok;
  if (!a.json.empty()) write_json(a.json, j);

  std::cout << "records " << seq.records.size() << ", qmax bits " << bit_length(qmax) << "\n";
  std::cout << "singular witness (n >= " << a.n_from << "): " << (wit_ok ? "pass" : "FAIL") << " over " << wit.size()
            << " records\n";
  std::cout << "uniform bound D(Q) <= Q^-mu on [qmin, qmax]: " << (ub.ok ? "pass" : "FAIL") << " over "
            << ub.segments << " segments\n";
  if (degenerate) std::cout << "degenerate: theta is rational or reached exactly\n";
  if (!ok) throw Failed{"singularity verification"};
  return 0;
}

// ---------------------------------------------------------------------------
// dim

int cmd_dim_boxcount(const std::string& tree_in, const std::string& scales, const std::string& out,
                     const RunConfig& cfg) {
  Tree t = tree_from_json(read_json(tree_in));
  BoxCountResult r = boxcount(leaf_points(t), parse_scales(scales));
  CsvTable T;
  T.columns = {"k", "delta", "N"};
  for (const auto& [k, n] : r.counts) {
    T.rows.push_back({std::to_string(k), "2^-" + std::to_string(k), std::to_string(n)});
  }
  if (!out.empty()) write_text(out, T.render(cfg));
  std::cout << "slope " << r.slope << " se " << r.std_error << " band [" << r.band_lo() << ", " << r.band_hi()
            << "]\n";
  return 0;
}

int cmd_dim_local(const std::string& tree_in, const std::string& s_in, const std::string& out, const RunConfig& cfg) {
  Tree t = tree_from_json(read_json(tree_in));
  Rational s = resolve_s(s_in, t.params);
  CylinderMeasure mm = mass_measure(t, s, false);
  LocalDimReport rep = local_dimension(mm, t);
  CsvTable T;
  T.columns = {"node", "depth", "ratio", "ratio_width", "exact"};
  for (const auto& row : rep.rows) {
    auto rc = csv_real(row.ratio);
    T.rows.push_back({std::to_string(row.node), std::to_string(t.nodes[row.node].depth), rc[0], rc[1],
                      row.exact ? "true" : "false"});
  }
  if (!out.empty()) write_text(out, T.render(cfg));
  std::cout << "s " << CertifiedReal(s).decimal(8) << " nodes " << rep.rows.size() << "\n";
  std::cout << "min " << rep.min << " q10 " << rep.q10 << " median " << rep.median << " q90 " << rep.q90 << " max "
            << rep.max << "\n";
  std::cout << "fraction >= s-0.2: " << rep.fraction_at_least_s_minus_02
            << (rep.systematically_below ? " (systematically below s)" : "") << "\n";
  if (mm.renormalized) std::cout << "note: weights renormalized over capped child sets\n";
  return 0;
}

int cmd_dim_profile(const std::string& tree_in, std::size_t node, const std::string& s_in, std::size_t radii,
                    std::size_t witnesses, std::size_t per_witness, const std::string& out, const RunConfig& cfg) {
  Tree t = tree_from_json(read_json(tree_in));
  if (node >= t.nodes.size()) throw DomainError("node id out of range");
  Rational s = resolve_s(s_in, t.params);
  CountingScene S = make_scene(t.nodes[node], t.params, witnesses, per_witness);
  ProfileReport rep = counting_profile(S, s, radius_grid(S, radii));
  CsvTable T;
  T.columns = {"r", "count", "f", "f_width", "bound", "bound_width", "ok"};
  for (const auto& row : rep.rows) {
    auto f = csv_real(row.f), b = csv_real(row.bound);
    T.rows.push_back({to_string(row.r), std::to_string(row.count), f[0], f[1], b[0], b[1], row.ok ? "true" : "false"});
  }
  if (!out.empty()) write_text(out, T.render(cfg));
  std::cout << "scene size " << S.size() << " in " << S.clusters.size() << " clusters\n";
  for (const auto& c : rep.hypotheses.checks) std::cout << c.name << ": " << (c.ok ? "ok" : "FAIL") << "\n";
  for (const auto& row : rep.rows) {
    std::cout << "r=" << fmt(CertifiedReal(row.r), 6) << " count=" << row.count << " f=" << fmt(row.f, 6)
              << " bound=" << fmt(row.bound, 6) << (row.ok ? "" : " VIOLATION") << "\n";
  }
  if (!rep.ok()) throw Failed{"counting bound"};
  return 0;
}

int cmd_dim_upper_audit(const std::string& mu_s, const std::string& s_s, const std::string& gamma_s,
                        const std::string& root, const std::string& cutoff_s, std::size_t shells,
                        const std::string& out, const std::string& json_path, const RunConfig& cfg) {
  Rational mu = parse_rational(mu_s);
  require_mu(mu);
  Rational s = parse_rational(s_s);
  Rational gamma = gamma_s == "auto" ? (below_branch_point(mu) ? upper_gamma(mu).gamma : Rational(0))
                                     : parse_rational(gamma_s);
  Integer top = floor(parse_rational(cutoff_s));
  if (shells == 0) throw ParseError("shells must be positive");
  std::vector<Integer> cuts;
  for (std::size_t i = shells; i-- > 0;) {
    Integer c = top >> static_cast<mp_bitcnt_t>(i);
    if (c < 1) throw DomainError("cutoff too small for the number of shells");
    cuts.push_back(c);
  }
  UpperAuditReport r = upper_covering_audit(make_primitive(parse_triple(root)), mu, s, gamma, cuts);
  CsvTable T;
  T.columns = {"cutoff", "count_z", "shell_ratio", "partial_ratio", "log_decrement"};
  char buf[64];
  auto d = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& sh : r.shells) {
    T.rows.push_back({to_string(sh.cutoff), std::to_string(sh.count_z), d(sh.shell_ratio), d(sh.partial_ratio),
                      sh.log_decrement ? d(*sh.log_decrement) : ""});
  }
  if (!out.empty()) write_text(out, T.render(cfg));
  Json j = header("singvec-upper-audit", cfg);
  j["x"] = triple_json(r.x);
  j["exponents"] = Json{{"a", io::jrat(r.exponents.a)},
                        {"b", io::jrat(r.exponents.b)},
                        {"A", io::jrat(r.exponents.A)},
                        {"B", io::jrat(r.exponents.B)}};
  j["count_y"] = r.count_y;
  j["predicted_decay"] = r.predicted_decay;
  j["monotone"] = r.monotone;
  j["shells_decreasing"] = r.shells_decreasing;
  j["tail_decreasing"] = r.tail_decreasing;
  j["decay_sign_matches"] = r.decay_sign_matches;
  j["below_one"] = r.below_one;
  if (!json_path.empty()) write_json(json_path, j);
  std::cout << "x " << r.x << " mu " << to_string(mu) << " s " << to_string(s) << " gamma " << to_string(gamma)
            << "\n";
  std::cout << "exponents b=" << r.exponents.b.get_d() << " A=" << r.exponents.A.get_d()
            << " B=" << r.exponents.B.get_d() << " predicted_decay=" << r.predicted_decay << "\n";
  for (const auto& sh : r.shells) {
    std::cout << "cutoff " << sh.cutoff << " z=" << sh.count_z << " shell " << sh.shell_ratio << " partial "
              << sh.partial_ratio << "\n";
  }
  std::cout << "monotone=" << r.monotone << " tail_decreasing=" << r.tail_decreasing
            << " decay_sign_matches=" << r.decay_sign_matches << " below_one=" << r.below_one << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singvec: exact constructions of singular vectors and their dimension bounds"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads for tree expansion")->check(CLI::Range(1u, 256u));

  std::function<int()> run;
  auto bind = [&](CLI::App* sub, std::function<int(const RunConfig&)> f, const std::string& name) {
    sub->callback([&, sub, f, name] {
      run = [&, sub, f, name] {
        RunConfig cfg = make_config(name, sub, &app);
        cfg.threads = threads;
        return f(cfg);
      };
    });
  };

  // lattice
  auto* lat = app.add_subcommand("lattice", "Farey lattice of a primitive vector");
  lat->require_subcommand(1);
  auto* minima = lat->add_subcommand("minima", "reduced basis and successive minima");
  std::string lx, ljson;
  minima->add_option("--x", lx, "p1,p2,q")->required();
  minima->add_option("--json", ljson, "JSON output path ('-' for stdout)");
  bind(minima, [&](const RunConfig& c) { return cmd_lattice_minima(lx, ljson, c); }, "lattice minima");

  // bestapprox
  auto* ba = app.add_subcommand("bestapprox", "best simultaneous approximation records");
  std::string theta, radius = "0", qmax, bjson;
  bool bai3 = false;
  ba->add_option("--theta", theta, "target a,b (rationals)")->required();
  ba->add_option("--radius", radius, "enclosure radius around the target");
  ba->add_option("--qmax", qmax, "height bound")->required();
  ba->add_option("--json", bjson, "JSON output path");
  ba->add_flag("--verify-bai3", bai3, "append the record-structure report");
  bind(ba, [&](const RunConfig& c) { return cmd_bestapprox(theta, radius, qmax, bjson, bai3, c); }, "bestapprox");

  // formulas
  auto* fm = app.add_subcommand("formulas", "closed-form dimension bounds");
  fm->require_subcommand(1);
  auto* table = fm->add_subcommand("table", "CSV table over a mu range");
  std::string fmu, fout = "-";
  table->add_option("--mu", fmu, "lo:hi:step or a single value")->required();
  table->add_option("--out", fout, "CSV output path ('-' for stdout)");
  bind(table, [&](const RunConfig& c) { return cmd_formulas_table(fmu, fout, c); }, "formulas table");

  // tree
  auto* tr = app.add_subcommand("tree", "Cantor tree construction and verification");
  tr->require_subcommand(1);
  auto* build = tr->add_subcommand("build", "build a tree and write it as JSON");
  TreeArgs ta;
  build->add_option("--mu", ta.mu, "uniform exponent");
  build->add_option("--b", ta.b, "growth parameter or 'auto'");
  build->add_option("--depth", ta.depth, "number of generations");
  build->add_option("--cap", ta.cap, "children per node");
  build->add_option("--budget", ta.budget, "maximal node count");
  build->add_option("--root", ta.root, "root p1,p2,q");
  build->add_option("--out", ta.out, "tree JSON path")->required();
  build->add_option("--csv", ta.csv, "per-node summary CSV path");
  bind(build, [&](const RunConfig& c) { return cmd_tree_build(ta, c); }, "tree build");

  auto* verify = tr->add_subcommand("verify", "recompute the certified checks of a tree file");
  VerifyArgs va;
  verify->add_option("--in", va.in, "tree JSON path")->required();
  verify->add_option("--checks", va.checks, "comma list of nestedness,family,disjoint,tiling,counting or all");
  verify->add_option("--report", va.report, "JSON report path");
  verify->add_option("--s", va.s, "exponent of the counting profile or 's1'");
  verify->add_option("--scene-depth", va.scene_depth, "deepest node depth with a counting scene");
  verify->add_option("--cell-limit", va.cell_limit, "materialized tiling cells per node");
  verify->add_option("--radii", va.radii, "radius grid size of the counting profile");
  bind(verify, [&](const RunConfig& c) { return cmd_tree_verify(va, c); }, "tree verify");

  // singular
  auto* sg = app.add_subcommand("singular", "singular vectors from tree paths");
  sg->require_subcommand(1);
  auto* gen = sg->add_subcommand("generate", "extract a target enclosure along a path");
  GenerateArgs ga;
  ga.tree.depth = 5;
  ga.tree.cap = 1;
  gen->add_option("--mu", ga.tree.mu, "uniform exponent");
  gen->add_option("--b", ga.tree.b, "growth parameter or 'auto'");
  gen->add_option("--depth", ga.tree.depth, "path depth");
  gen->add_option("--cap", ga.tree.cap, "children per node");
  gen->add_option("--root", ga.tree.root, "root p1,p2,q");
  gen->add_option("--path", ga.path, "child indices per generation, default first child");
  gen->add_option("--out", ga.out, "theta JSON path")->required();
  bind(gen, [&](const RunConfig& c) { return cmd_singular_generate(ga, c); }, "singular generate");

  auto* sv = sg->add_subcommand("verify", "best approximations and singularity witnesses of a target");
  SingularVerifyArgs sa;
  sv->add_option("--in", sa.in, "theta JSON path");
  sv->add_option("--theta", sa.theta, "target a,b instead of --in");
  sv->add_option("--radius", sa.radius, "enclosure radius with --theta");
  sv->add_option("--mu", sa.mu, "uniform exponent")->required();
  sv->add_option("--qmax", sa.qmax, "height bound or 'auto' (parent of the deepest path node)");
  sv->add_option("--qmin", sa.qmin, "lower end of the uniform check or 'auto'");
  sv->add_option("--from", sa.n_from, "first record index of the witness check");
  sv->add_option("--json", sa.json, "JSON report path");
  bind(sv, [&](const RunConfig& c) { return cmd_singular_verify(sa, c); }, "singular verify");

  // dim
  auto* dm = app.add_subcommand("dim", "dimension diagnostics");
  dm->require_subcommand(1);
  auto* bc = dm->add_subcommand("boxcount", "box counting on the leaves of a tree");
  std::string btree, bscales = "2^-4..2^-20", bout;
  bc->add_option("--tree", btree, "tree JSON path")->required();
  bc->add_option("--scales", bscales, "2^-a..2^-b");
  bc->add_option("--out", bout, "CSV of (k, delta, N)");
  bind(bc, [&](const RunConfig& c) { return cmd_dim_boxcount(btree, bscales, bout, c); }, "dim boxcount");

  auto* loc = dm->add_subcommand("local", "local dimension ratios of the cylinder measure");
  std::string ltree, ls = "s1", lout;
  loc->add_option("--tree", ltree, "tree JSON path")->required();
  loc->add_option("--s", ls, "exponent or 's1'");
  loc->add_option("--out", lout, "CSV of per-node ratios");
  bind(loc, [&](const RunConfig& c) { return cmd_dim_local(ltree, ls, lout, c); }, "dim local");

  auto* pf = dm->add_subcommand("profile", "counting profile of one node's scene");
  std::string ptree, ps = "s1", pout;
  std::size_t pnode = 0, pradii = 5, pwit = 3, pper = 400;
  pf->add_option("--tree", ptree, "tree JSON path")->required();
  pf->add_option("--node", pnode, "node id");
  pf->add_option("--s", ps, "exponent or 's1'");
  pf->add_option("--radii", pradii, "radius grid size");
  pf->add_option("--witnesses", pwit, "E-points in the scene");
  pf->add_option("--per-witness", pper, "D-points per E-point");
  pf->add_option("--out", pout, "CSV of (r, f(r), bound)");
  bind(pf, [&](const RunConfig& c) { return cmd_dim_profile(ptree, pnode, ps, pradii, pwit, pper, pout, c); },
       "dim profile");

  auto* ua = dm->add_subcommand("upper-audit", "partial sums of the upper covering");
  std::string umu, us, ugamma = "auto", uroot = "1,0,10", ucut = "1e5", uout, ujson;
  std::size_t ushells = 4;
  ua->add_option("--mu", umu, "uniform exponent")->required();
  ua->add_option("--s", us, "covering exponent")->required();
  ua->add_option("--gamma", ugamma, "refinement exponent or 'auto'");
  ua->add_option("--root", uroot, "p1,p2,q in Q_mu");
  ua->add_option("--cutoff", ucut, "largest height cutoff");
  ua->add_option("--shells", ushells, "number of dyadic shells below the cutoff");
  ua->add_option("--out", uout, "CSV shell table");
  ua->add_option("--json", ujson, "JSON summary");
  bind(ua, [&](const RunConfig& c) { return cmd_dim_upper_audit(umu, us, ugamma, uroot, ucut, ushells, uout, ujson, c); },
       "dim upper-audit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (!run) return 2;
  try {
    return run();
  } catch (const Failed& f) {
    std::cerr << "failed: " << f.what << "\n";
    return 1;
  } catch (const singvec::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ZeroVector& e) {
    std::cerr << "ZeroVector: " << e.what() << "\n";
    return 1;
  } catch (const HeightTooSmall& e) {
    std::cerr << "HeightTooSmall: " << e.what() << "\n";
    return 1;
  } catch (const EnclosureTooCoarse& e) {
    std::cerr << "EnclosureTooCoarse: " << e.what() << "\n";
    return 1;
  } catch (const singvec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
