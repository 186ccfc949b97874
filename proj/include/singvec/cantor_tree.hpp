#pragma once
/**
 * \file cantor_tree.hpp
 * \brief Nested self-similar structure: child enumeration E1/D1, balls B and B',
 * certified node and family checks, tree building and point extraction.
 */

#include <algorithm>
#include <cstddef>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "singvec/best_approx.hpp"
#include "singvec/certified.hpp"
#include "singvec/errors.hpp"
#include "singvec/exponents.hpp"
#include "singvec/number.hpp"
#include "singvec/rational_geometry.hpp"

namespace singvec {

/** \brief Construction parameters; unset constants are calibrated adaptively. */
struct TreeParams {
  Rational mu;
  Rational b;
  CertifiedReal c0;  ///< 32^(1/(1-mu))
  std::optional<Rational> c1;
  std::optional<Rational> c2;
  std::optional<Rational> c3;
  std::optional<Rational> c4;
  Integer min_height = 2;
  NodeExponents exps;
  Rational band = 64;       ///< band half-width for value/nominal ratios
  Rational tiling_c0 = 64;  ///< distortion constant of the tiling

  bool resolved() const { return c1 && c2 && c4; }
  Rational one_plus_b() const { return 1 + b; }
  /** \brief Exponent of the packing radius: -(mu + 1 + 2b) / (1 + b). */
  Rational packing_exponent() const { return -(mu + 1 + 2 * b) / (1 + b); }
};

inline TreeParams make_tree_params(const Rational& mu, const Rational& b) {
  require_mu_b(mu, b);
  TreeParams P;
  P.mu = mu;
  P.b = b;
  P.c0 = pow(CertifiedReal(32), CertifiedReal(Rational(1) / (1 - mu)));
  P.exps = node_exponents(mu, b);
  return P;
}

/** \brief b0(mu) rounded to a short rational below 1/sqrt(2), else 32. */
inline Rational resolve_b_auto(const Rational& mu) {
  require_mu(mu);
  if (below_branch_point(mu)) return b0_rational(mu, Rational(1, 10000));
  return Rational(32);
}

/** \brief The E1 intermediate and D1 coordinates of a non-root node. */
struct Witness {
  PrimitiveVector y;
  Vec2 alpha;      ///< pi_x(y) = m u1 + u2
  Integer m;
  Integer k;       ///< y = base + k x
  IntVec3 lift;    ///< y' with Z^3 cap H_y = Z y + Z y'
  Integer a;       ///< z = a y' + kz y
  Integer kz;
};

/** \brief One vertex of the tree. */
struct TreeNode {
  std::size_t id = 0;
  PrimitiveVector x;
  FareyLattice lattice;
  std::optional<std::size_t> parent;
  std::optional<Witness> witness;
  Rational radius;          ///< radius of B(x)
  Rational packing_radius;  ///< radius of B'(x)
  std::size_t depth = 0;
  bool bootstrap = false;
  /** \brief Children were selected from a larger family. */
  bool truncated = false;
  std::vector<std::size_t> children;

  Rational ball_radius_sq() const { return radius * radius; }
  Rational packing_radius_sq() const { return packing_radius * packing_radius; }
};

/** \brief Named pass/fail entry of a report. */
struct Check {
  std::string name;
  bool ok = true;
  bool exempt = false;
  std::string detail;
};

/** \brief Collection of checks about one node. */
struct NodeReport {
  std::size_t node = 0;
  std::vector<Check> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok || c.exempt; });
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
      if (!c.ok && !c.exempt) out.push_back(c.name);
    }
    return out;
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
  void add(const std::string& name, bool ok, std::string detail = {}) {
    checks.push_back({name, ok, false, std::move(detail)});
  }
  void exempt(const std::string& name, std::string why) { checks.push_back({name, true, true, std::move(why)}); }
  /** \brief Runs a certified predicate; an undecided comparison counts as a failure. */
  void certify(const std::string& name, const std::function<bool()>& pred) {
    try {
      add(name, pred());
    } catch (const TieBreak&) {
      add(name, false, "undecided");
    }
  }
};

namespace detail {

inline CertifiedReal cpow(const CertifiedReal& base, const Rational& e) { return pow(base, CertifiedReal(e)); }
inline CertifiedReal csqrt_q(const Rational& r) { return sqrt(CertifiedReal(r)); }

inline bool le(const CertifiedReal& a, const CertifiedReal& b) { return compare(a, b) <= 0; }
inline bool lt(const CertifiedReal& a, const CertifiedReal& b) { return compare(a, b) < 0; }

inline bool in_band(const CertifiedReal& value, const CertifiedReal& nominal, const Rational& band) {
  CertifiedReal ratio = value / nominal;
  return le(CertifiedReal(Rational(1 / band)), ratio) && le(ratio, CertifiedReal(band));
}

/** \brief Evenly spread integers in [-M, M], W of them, without repeats. */
inline std::vector<Integer> spread(const Integer& M, std::size_t W) {
  std::vector<Integer> out;
  if (W == 0) return out;
  if (W == 1) return {Integer(0)};
  for (std::size_t i = 0; i < W; ++i) {
    Integer v = -M + floor_div(Integer(2) * M * Integer(static_cast<unsigned long>(i)),
                               Integer(static_cast<unsigned long>(W - 1)));
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

}  // namespace detail

/** \brief Integer interval [lo, hi]; empty when lo > hi. */
struct HeightWindow {
  Integer lo;
  Integer hi;
  bool empty() const { return lo > hi; }
};

/** \brief Integer heights y3 with (32 |x| |alpha|)^(1/(1-mu)) <= y3 <= 2 (32 |x| |alpha|)^(1/(1-mu)). */
inline HeightWindow e1_height_window(const TreeParams& P, const Integer& q, const Rational& alpha_sq) {
  Rational e = 2 * (1 - P.mu);
  unsigned long n = e.get_num().get_ui();
  unsigned long d = e.get_den().get_ui();
  Rational B = Rational(32 * q) * Rational(32 * q) * alpha_sq;
  Rational Bd = rpow(B, d);
  Rational two_n = rpow(Rational(2), n);
  return {ceil_root(ceil(Bd), n), iroot(floor(Rational(two_n * Bd)), n)};
}

/** \brief Integer heights z3 with y3^(1+b) / 2 <= z3 <= y3^(1+b). */
inline HeightWindow d1_height_window(const TreeParams& P, const Integer& y3) {
  Rational e = P.one_plus_b();
  unsigned long n = e.get_num().get_ui();
  unsigned long r = e.get_den().get_ui();
  Integer Yp = ipow(y3, n);
  return {ceil_div(ceil_root(Yp, r), Integer(2)), iroot(Yp, r)};
}

/** \brief Continuous lower end (32 |x| |alpha|)^(1/(1-mu)) of the E1 window. */
inline CertifiedReal e1_window_low(const TreeParams& P, const Integer& q, const Rational& alpha_sq) {
  Rational B = Rational(32 * q) * Rational(32 * q) * alpha_sq;
  return detail::cpow(CertifiedReal(B), Rational(1) / (2 * (1 - P.mu)));
}

/** \brief |m| <= M exactly when |m u1| <= lambda2. */
inline Integer alpha_bound(const FareyLattice& L) { return isqrt(floor(Rational(L.lam2_sq / L.lam1_sq))); }

/** \brief The E1 points above one first-level vector alpha_m = m u1 + u2. */
struct AlphaWindow {
  Integer m;
  Vec2 alpha;
  Rational alpha_sq;
  IntVec3 base;  ///< preimage of alpha with last coordinate in [0, q)
  HeightWindow heights;
  Integer k_lo;
  Integer k_hi;

  bool empty() const { return k_lo > k_hi; }
  Integer count() const { return empty() ? Integer(0) : Integer(k_hi - k_lo + 1); }
  IntVec3 lift(const Integer& k, const PrimitiveVector& x) const { return base + k * x.vec(); }
};

inline AlphaWindow alpha_window(const PrimitiveVector& x, const FareyLattice& L, const TreeParams& P,
                                const Integer& m) {
  const Integer& q = x.q();
  AlphaWindow w;
  w.m = m;
  w.alpha = m * L.u1 + L.u2;
  w.alpha_sq = norm_sq(w.alpha);
  w.base = m * L.w1 + L.w2;
  Integer j = floor_div(w.base.q, q);
  if (j != 0) w.base = w.base - j * x.vec();
  w.heights = e1_height_window(P, q, w.alpha_sq);
  w.k_lo = ceil_div(w.heights.lo - w.base.q, q);
  w.k_hi = floor_div(w.heights.hi - w.base.q, q);
  return w;
}

/** \brief One element y of E1(x). */
struct E1Entry {
  PrimitiveVector y;
  Vec2 alpha;
  Integer m;
  Integer k;
};

/** \brief Visits every y in E1(x) in order of (m, y3). */
inline void for_each_E1(const TreeNode& node, const TreeParams& P,
                        const std::function<void(const AlphaWindow&, const Integer&)>& f) {
  Integer M = alpha_bound(node.lattice);
  for (Integer m = -M; m <= M; ++m) {
    AlphaWindow w = alpha_window(node.x, node.lattice, P, m);
    for (Integer k = w.k_lo; k <= w.k_hi; ++k) f(w, k);
  }
}

/** \brief card E1(x), counted window by window. */
inline Integer count_E1(const TreeNode& node, const TreeParams& P) {
  Integer M = alpha_bound(node.lattice);
  Integer total = 0;
  for (Integer m = -M; m <= M; ++m) total += alpha_window(node.x, node.lattice, P, m).count();
  return total;
}

/** \brief E1(x) with the defining predicates re-checked on every element. */
inline std::vector<E1Entry> enumerate_E1(const TreeNode& node, const TreeParams& P) {
  std::vector<E1Entry> out;
  for_each_E1(node, P, [&](const AlphaWindow& w, const Integer& k) {
    IntVec3 v = w.lift(k, node.x);
    PrimitiveVector y = make_primitive(v);
    if (y.vec() != v) throw InvariantViolation("E1 lift is not primitive");
    if (member_H(node.x, node.lattice, y)) throw InvariantViolation("E1 lift lies in H_x");
    if (project_along(node.x, v) != w.alpha) throw InvariantViolation("E1 lift has the wrong projection");
    out.push_back({y, w.alpha, w.m, k});
  });
  if (out.empty()) throw HeightTooSmall("E1 is empty at this height");
  return out;
}

/** \brief Parametrization z = a y' + k y of D1(y). */
struct D1Window {
  PrimitiveVector y;
  FareyLattice lattice;  ///< of y
  HSublattice sub;       ///< generator u_y and lift y'
  HeightWindow heights;
  Integer a_max;
  Rational c1;

  /** \brief Admissible k for a given a, before the coprimality filter. */
  HeightWindow k_range(const Integer& a) const {
    const Integer& y3 = y.q();
    Integer lo = std::max(heights.lo, ceil(Rational(abs(a) * y3) / c1));
    Integer base = a * sub.lift.q;
    return {ceil_div(lo - base, y3), floor_div(heights.hi - base, y3)};
  }
  IntVec3 point(const Integer& a, const Integer& k) const { return a * sub.lift + k * y.vec(); }
};

inline D1Window d1_window(const PrimitiveVector& y, const TreeParams& P) {
  if (!P.c1) throw DomainError("c1 is not resolved");
  D1Window D;
  D.y = y;
  D.lattice = farey_lattice(y);
  D.sub = sublattice_H(y, D.lattice);
  D.heights = d1_height_window(P, y.q());
  D.c1 = *P.c1;
  D.a_max = D.heights.empty() ? Integer(0) : floor(Rational(*P.c1 * D.heights.hi / y.q()));
  return D;
}

/** \brief One element z of D1(y). */
struct D1Entry {
  PrimitiveVector z;
  Integer a;
  Integer k;
};

/** \brief Visits every coprime (a, k) of D1(y), by a then k. */
inline void for_each_D1(const D1Window& D, const std::function<void(const Integer&, const Integer&)>& f) {
  for (Integer a = -D.a_max; a <= D.a_max; ++a) {
    if (a == 0) continue;
    HeightWindow kr = D.k_range(a);
    for (Integer k = kr.lo; k <= kr.hi; ++k) {
      if (gcd(a, k) == 1) f(a, k);
    }
  }
}

namespace detail {

/** \brief Distinct prime factors of n > 0 by trial division. */
inline std::vector<Integer> prime_factors(Integer n) {
  std::vector<Integer> ps;
  n = abs(n);
  for (Integer p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

/** \brief Number of k in [lo, hi] coprime to a, by inclusion-exclusion. */
inline Integer coprime_count(const Integer& a, const Integer& lo, const Integer& hi) {
  if (lo > hi) return 0;
  std::vector<Integer> ps = prime_factors(a);
  Integer total = 0;
  std::size_t n = ps.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    Integer d = 1;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t(1) << i)) {
        d *= ps[i];
        ++bits;
      }
    }
    Integer c = floor_div(hi, d) - floor_div(lo - 1, d);
    if (bits % 2) total -= c;
    else total += c;
  }
  return total;
}

}  // namespace detail

/** \brief card D1(y). */
inline Integer count_D1(const D1Window& D) {
  Integer total = 0;
  for (Integer a = 1; a <= D.a_max; ++a) {
    HeightWindow kp = D.k_range(a);
    HeightWindow kn = D.k_range(-a);
    total += detail::coprime_count(a, kp.lo, kp.hi) + detail::coprime_count(a, kn.lo, kn.hi);
  }
  return total;
}

/** \brief D1(y) in order (|z|, p1, p2), every element re-checked exactly. */
inline std::vector<D1Entry> enumerate_D1(const D1Window& D) {
  std::vector<D1Entry> out;
  const Integer& y3 = D.y.q();
  Rational bound = D.c1 * D.c1 * D.lattice.lam1_sq / (Rational(y3) * y3);
  for_each_D1(D, [&](const Integer& a, const Integer& k) {
    IntVec3 v = D.point(a, k);
    PrimitiveVector z = make_primitive(v);
    if (z.vec() != v) throw InvariantViolation("D1 point is not primitive");
    if (!member_H(D.y, D.lattice, z)) throw InvariantViolation("D1 point is not in H_y");
    if (z.q() < D.heights.lo || z.q() > D.heights.hi) throw InvariantViolation("D1 point outside the window");
    if (dist_sq(D.y.point(), z.point()) > bound) throw InvariantViolation("D1 point too far from y-hat");
    out.push_back({z, a, k});
  });
  std::sort(out.begin(), out.end(), [](const D1Entry& s, const D1Entry& t) {
    if (s.z.q() != t.z.q()) return s.z.q() < t.z.q();
    if (s.z.p1() != t.z.p1()) return s.z.p1() < t.z.p1();
    return s.z.p2() < t.z.p2();
  });
  return out;
}

/** \brief Extreme point of the child family: |alpha|, y3 = t Ylo(alpha), z3 = s y3^(1+b). */
struct Corner {
  CertifiedReal alpha_sq;
  CertifiedReal alpha;
  CertifiedReal y3;
  CertifiedReal zmax;  ///< y3^(1+b)
  CertifiedReal z3;
};

/** \brief Bounds describing every grandchild family below a node. */
struct FamilyData {
  Integer M;
  Rational alpha_min_sq;
  Rational alpha_max_sq;
  CertifiedReal Y0;      ///< continuous window low end at |alpha| = lambda2
  CertifiedReal Ylo_max; ///< continuous window low end at the largest |alpha|
  Integer y_lo;          ///< least integer height of the alpha_0 window
  Integer y_hi;          ///< largest integer height of the widest window
  std::vector<Corner> corners;
  CertifiedReal R1;       ///< upper bound on lambda1(y) / |y|
  CertifiedReal rho;      ///< lower bound on distances between distinct y-hat
  bool rho_exact = false; ///< rho is the attained minimum
  CertifiedReal dmax;     ///< upper bound on d(x-hat, y-hat)
  CertifiedReal zmin_all; ///< lower bound on |z|
  CertifiedReal sep_min;  ///< lower bound on d(z-hat, z'-hat) for siblings with the same y
  bool enumerable = false;
};

inline constexpr long kEnumerableAlphas = 64;

inline FamilyData family_data(const TreeNode& node, const TreeParams& P) {
  const FareyLattice& L = node.lattice;
  const Integer& q = node.x.q();
  FamilyData F;
  F.M = alpha_bound(L);
  F.alpha_min_sq = L.lam2_sq;
  F.alpha_max_sq = std::max(norm_sq(F.M * L.u1 + L.u2), norm_sq(Integer(-F.M) * L.u1 + L.u2));
  F.Y0 = e1_window_low(P, q, F.alpha_min_sq);
  F.Ylo_max = e1_window_low(P, q, F.alpha_max_sq);
  F.y_lo = e1_height_window(P, q, F.alpha_min_sq).lo;
  F.y_hi = e1_height_window(P, q, F.alpha_max_sq).hi;
  if (F.y_lo > F.y_hi) throw HeightTooSmall("E1 window is empty");

  Rational ob = P.one_plus_b();
  for (const Rational& asq : {F.alpha_min_sq, F.alpha_max_sq}) {
    CertifiedReal ylow = e1_window_low(P, q, asq);
    CertifiedReal al = detail::csqrt_q(asq);
    for (int t : {1, 2}) {
      CertifiedReal y3 = CertifiedReal(t) * ylow;
      CertifiedReal zmax = detail::cpow(y3, ob);
      for (const Rational& s : {Rational(1, 2), Rational(1)}) {
        F.corners.push_back({CertifiedReal(asq), al, y3, zmax, CertifiedReal(s) * zmax});
      }
    }
  }

  CertifiedReal qq(q);
  CertifiedReal amax = detail::csqrt_q(F.alpha_max_sq);
  CertifiedReal Ymax = CertifiedReal(2) * F.Ylo_max;
  F.zmin_all = detail::cpow(CertifiedReal(F.y_lo), ob) / CertifiedReal(2);
  F.sep_min = F.corners[0].alpha * qq / (F.corners[0].zmax * F.corners[0].zmax);
  for (const auto& c : F.corners) F.sep_min = min(F.sep_min, c.alpha * qq / (c.zmax * c.zmax));

  F.enumerable = F.M < kEnumerableAlphas;
  if (!F.enumerable) {
    F.R1 = qq * detail::csqrt_q(F.alpha_min_sq) / (F.Y0 * F.Y0);
    F.dmax = detail::csqrt_q(F.alpha_min_sq) / F.Y0;
    CertifiedReal same = qq * amax / (Ymax * (Ymax + qq));
    CertifiedReal cross = CertifiedReal(1) / (qq * Ymax * amax);
    F.rho = min(same, cross);
    return F;
  }

  std::optional<Rational> r1_sq, d_sq, same_sq;
  Integer top_all = 0;
  for (Integer m = -F.M; m <= F.M; ++m) {
    AlphaWindow w = alpha_window(node.x, L, P, m);
    if (w.empty()) continue;
    Integer first = w.base.q + w.k_lo * q;
    Integer top = w.base.q + w.k_hi * q;
    if (top > top_all) top_all = top;
    Rational f2 = Rational(first) * first;
    Rational r1 = Rational(q) * q * w.alpha_sq / (f2 * f2);
    Rational dd = w.alpha_sq / f2;
    if (!r1_sq || r1 > *r1_sq) r1_sq = r1;
    if (!d_sq || dd > *d_sq) d_sq = dd;
    if (w.k_hi > w.k_lo) {
      Rational den = Rational(top) * Rational(top - q);
      Rational s2 = Rational(q) * q * w.alpha_sq / (den * den);
      if (!same_sq || s2 < *same_sq) same_sq = s2;
    }
  }
  if (!r1_sq) throw HeightTooSmall("E1 is empty at this height");
  F.R1 = detail::csqrt_q(*r1_sq);
  F.dmax = detail::csqrt_q(*d_sq);
  CertifiedReal cross = CertifiedReal(1) / (qq * CertifiedReal(top_all) * amax);
  if (same_sq) {
    CertifiedReal same = detail::csqrt_q(*same_sq);
    F.rho_exact = detail::le(same, cross);
    F.rho = F.rho_exact ? same : cross;
  } else {
    F.rho = cross;
  }
  return F;
}

/** \brief Ball radii of a non-root node at height q. */
inline std::pair<Rational, Rational> node_radii(const Integer& q, const TreeParams& P) {
  CertifiedReal qq(q);
  Rational r = round_down_dyadic(CertifiedReal(*P.c2) * detail::cpow(qq, P.exps.r0));
  Rational rp = round_down_dyadic(CertifiedReal(*P.c4) * detail::cpow(qq, P.packing_exponent()));
  return {r, rp};
}

/** \brief Bootstrap root (p1, p2, q): r = lambda1 / (4q) rounded down, r' = 2r. */
inline TreeNode make_root(const PrimitiveVector& x, const TreeParams& P) {
  if (x.q() < P.min_height) throw HeightTooSmall("root height below min_height");
  TreeNode n;
  n.x = x;
  n.lattice = farey_lattice(x);
  n.radius = round_down_dyadic(n.lattice.lambda1() / CertifiedReal(Integer(4 * x.q())));
  n.packing_radius = 2 * n.radius;
  n.bootstrap = true;
  return n;
}

/** \brief Root (1, 0, N). */
inline TreeNode make_root(const Integer& N, const TreeParams& P) {
  if (N < P.min_height) throw HeightTooSmall("root height below min_height");
  return make_root(make_primitive(1, 0, N), P);
}

/** \brief Named candidate bounds gathered while calibrating constants. */
struct Calibration {
  std::vector<std::pair<std::string, CertifiedReal>> bounds;
};

namespace detail {

inline CertifiedReal corner_min(const FamilyData& F, const std::function<CertifiedReal(const Corner&)>& f) {
  CertifiedReal out = f(F.corners[0]);
  for (std::size_t i = 1; i < F.corners.size(); ++i) out = min(out, f(F.corners[i]));
  return out;
}

}  // namespace detail

/**
 * \brief Fixes unset c1, c4, c2 from the root generation.
 *
 * c1 = power of two below min(1/4, rho/(4 R1)) / 2; c4 = power of two below half the
 * least packing bound; c2 = power of two below the least nesting, Legendre,
 * disjointness and packing-containment bound.
 */
inline TreeParams calibrate(TreeParams P, const TreeNode& root, Calibration* cal = nullptr) {
  FamilyData F = family_data(root, P);
  CertifiedReal qq(root.x.q());
  auto note = [cal](const std::string& name, const CertifiedReal& v) {
    if (cal) cal->bounds.push_back({name, v});
  };
  if (!P.c1) {
    CertifiedReal v = min(CertifiedReal(Rational(1, 4)), F.rho / (CertifiedReal(4) * F.R1));
    note("c1", v);
    P.c1 = power_of_two_below(v / CertifiedReal(2));
  }
  if (*P.c1 > Rational(1, 4) || *P.c1 <= 0) throw DomainError("c1 must lie in (0, 1/4]");
  CertifiedReal c1(*P.c1);
  Rational pe = P.packing_exponent();
  Rational r0 = P.exps.r0;
  CertifiedReal zpe = detail::cpow(F.zmin_all, pe);
  if (!P.c4) {
    CertifiedReal same = detail::corner_min(F, [&](const Corner& c) {
      return c.alpha * qq /
             (CertifiedReal(2) * c.zmax * c.zmax * detail::cpow(c.zmax / CertifiedReal(2), pe));
    });
    CertifiedReal cross = (F.rho - CertifiedReal(2) * c1 * F.R1) / (CertifiedReal(2) * zpe);
    CertifiedReal parent = (CertifiedReal(root.packing_radius) - F.dmax - c1 * F.R1) / zpe;
    note("c4.packing_same", same);
    note("c4.packing_cross", cross);
    note("c4.packing_parent", parent);
    P.c4 = power_of_two_below(min(min(same, cross), parent) / CertifiedReal(2));
  }
  CertifiedReal c4(*P.c4);
  if (!P.c2) {
    CertifiedReal half_minus = CertifiedReal(Rational(1, 2)) - c1;
    CertifiedReal inner = detail::corner_min(F, [&](const Corner& c) {
      return half_minus * qq * c.alpha / (c.y3 * c.y3 * detail::cpow(c.z3, r0));
    });
    CertifiedReal legendre = detail::corner_min(F, [&](const Corner& c) {
      return qq * c.alpha / (CertifiedReal(2) * detail::cpow(c.z3, r0 + 2));
    });
    CertifiedReal same = detail::corner_min(F, [&](const Corner& c) {
      return qq * c.alpha / (CertifiedReal(2) * c.zmax * c.zmax * detail::cpow(c.zmax / CertifiedReal(2), r0));
    });
    CertifiedReal contain = detail::corner_min(F, [&](const Corner& c) {
      return CertifiedReal(Rational(1, 2)) * c4 * CertifiedReal(Rational(1 - 1 / rpow(Rational(2), 60))) *
             detail::cpow(c.z3, pe - r0);
    });
    CertifiedReal parent =
        (CertifiedReal(root.radius) - F.dmax - c1 * F.R1) / detail::cpow(F.zmin_all, r0);
    note("c2.nest_inner", inner);
    note("c2.legendre_z", legendre);
    note("c2.sep_same", same);
    note("c2.packing_contain", contain);
    note("c2.ball_parent", parent);
    P.c2 = power_of_two_below(min(min(min(inner, legendre), min(same, contain)), parent));
  }
  return P;
}

/** \brief Checks on one node against its parent and witness. */
inline NodeReport verify_node(const TreeNode& node, const TreeNode* parent, const TreeParams& P) {
  NodeReport rep;
  rep.node = node.id;
  const Integer& zq = node.x.q();
  const FareyLattice& Lz = node.lattice;
  rep.add("legendre_inner", node.ball_radius_sq() <= Lz.lam1_sq / (4 * Rational(zq) * zq));
  rep.add("packing_contain", 2 * node.radius <= node.packing_radius);
  const char* bands[] = {"band_lambda1_y", "band_lambda2_y", "band_lambda1_z",
                         "band_lambda2_z", "band_dist_xy",   "band_height_y"};
  if (!parent) {
    for (const char* b : bands) rep.exempt(b, "bootstrap-exempt");
    return rep;
  }
  if (!node.witness) {
    rep.add("witness_present", false);
    return rep;
  }
  const Witness& W = *node.witness;
  const TreeNode& X = *parent;
  const Integer& q = X.x.q();
  const PrimitiveVector& y = W.y;
  const Integer& y3 = y.q();
  FareyLattice Ly = farey_lattice(y);

  rep.certify("qmu", [&] { return compare_power(Rational(zq), -2 * P.mu, Lz.lam1_sq) >= 0; });

  Vec2 alpha = project_along(X.x, y.vec());
  Rational alpha_sq = norm_sq(alpha);
  bool e1 = alpha == W.alpha;
  try {
    auto [s, t] = lattice_coordinates(X.lattice, alpha);
    e1 = e1 && t == 1 && Rational(s * s) * X.lattice.lam1_sq <= X.lattice.lam2_sq;
  } catch (const NotPrimitive&) {
    e1 = false;
  }
  HeightWindow yw = e1_height_window(P, q, alpha_sq);
  e1 = e1 && y3 >= yw.lo && y3 <= yw.hi && !member_H(X.x, X.lattice, y);
  rep.add("e1_member", e1);

  HeightWindow zw = d1_height_window(P, y3);
  Rational dyz_sq = dist_sq(y.point(), node.x.point());
  bool d1 = node.x != y && member_H(y, Ly, node.x) && zq >= zw.lo && zq <= zw.hi &&
            dyz_sq * Rational(y3) * y3 <= *P.c1 * *P.c1 * Ly.lam1_sq;
  IntVec3 zv = W.a * W.lift + W.kz * y.vec();
  d1 = d1 && zv == node.x.vec() && gcd(W.a, W.kz) == 1;
  rep.add("d1_member", d1);

  Rational qa_sq = Rational(q) * q * alpha_sq;
  rep.add("lambda_y_identity", Ly.lam1_sq == qa_sq / (Rational(y3) * y3));
  rep.add("lambda_z_identity", Lz.lam1_sq == qa_sq / (Rational(zq) * zq));
  rep.add("radius_shrink", 2 * node.radius <= X.radius);

  CertifiedReal lam1y = Ly.lambda1();
  CertifiedReal Y3(y3);
  CertifiedReal dyz = detail::csqrt_q(dyz_sq);
  CertifiedReal dxy = detail::csqrt_q(dist_sq(X.x.point(), y.point()));
  CertifiedReal dxz = detail::csqrt_q(dist_sq(X.x.point(), node.x.point()));
  CertifiedReal r(node.radius), rp(node.packing_radius);
  rep.certify("nest_inner", [&] { return detail::lt(dyz + r, lam1y / (CertifiedReal(2) * Y3)); });
  rep.certify("nest_outer",
              [&] { return detail::le(dxy + CertifiedReal(2) * lam1y / Y3, CertifiedReal(X.radius)); });
  rep.certify("ball_in_parent", [&] { return detail::le(dxz + r, CertifiedReal(X.radius)); });
  rep.certify("packing_in_parent", [&] { return detail::le(dxz + rp, CertifiedReal(X.packing_radius)); });

  const Rational& mu = P.mu;
  const Rational& b = P.b;
  CertifiedReal Z3(zq);
  CertifiedReal inv32(Rational(1, 32));
  rep.certify("band_lambda1_y", [&] { return detail::in_band(lam1y, inv32 * detail::cpow(Y3, -mu), P.band); });
  rep.certify("band_lambda2_y",
              [&] { return detail::in_band(Ly.lambda2(), CertifiedReal(32) * detail::cpow(Y3, mu - 1), P.band); });
  rep.certify("band_lambda1_z", [&] {
    return detail::in_band(Lz.lambda1(), inv32 * detail::cpow(Z3, -(mu + b) / (1 + b)), P.band);
  });
  rep.certify("band_lambda2_z", [&] {
    return detail::in_band(Lz.lambda2(), CertifiedReal(32) * detail::cpow(Z3, (mu - 1) / (1 + b)), P.band);
  });
  if (X.bootstrap) {
    rep.exempt("band_dist_xy", "bootstrap-exempt");
    rep.exempt("band_height_y", "bootstrap-exempt");
  } else {
    CertifiedReal Q(q);
    rep.certify("band_dist_xy", [&] {
      CertifiedReal nominal = detail::cpow(CertifiedReal(32), -(1 + mu) / (1 - mu)) * detail::cpow(Q, P.exps.r0);
      return detail::in_band(dxy, nominal, P.band);
    });
    rep.certify("band_height_y", [&] {
      CertifiedReal nominal = detail::cpow(CertifiedReal(32), 2 / (1 - mu)) * detail::cpow(Q, P.exps.e_y);
      return detail::in_band(Y3, nominal, P.band);
    });
  }
  return rep;
}

/**
 * \brief Certificates covering every grandchild z of the node, not only the selected ones.
 *
 * Each condition is a monomial in |alpha|, t and s, so it is checked at the corners.
 */
inline NodeReport certify_family(const TreeNode& node, const FamilyData& F, const TreeParams& P) {
  NodeReport rep;
  rep.node = node.id;
  const Integer& q = node.x.q();
  CertifiedReal qq(q);
  CertifiedReal c1(*P.c1), c2(*P.c2), c4(*P.c4);
  Rational r0 = P.exps.r0, pe = P.packing_exponent();
  CertifiedReal two(2), half(Rational(1, 2));
  auto each = [&](const std::string& name, const std::function<bool(const Corner&)>& pred) {
    rep.certify(name, [&] {
      return std::all_of(F.corners.begin(), F.corners.end(), [&](const Corner& c) { return pred(c); });
    });
  };

  rep.add("min_height_all", Rational(F.y_lo) > Rational(q) * q * F.alpha_min_sq);
  rep.add("height_growth", compare_power(Rational(F.y_lo), P.b, Rational(2)) >= 0);
  rep.certify("nest_outer_all",
              [&] { return detail::le(F.dmax + two * F.R1, CertifiedReal(node.radius)); });
  each("nest_inner_all", [&](const Corner& c) {
    return detail::lt(c2 * detail::cpow(c.z3, r0), (half - c1) * qq * c.alpha / (c.y3 * c.y3));
  });
  each("legendre_z_all", [&](const Corner& c) {
    return detail::le(c2 * detail::cpow(c.z3, r0), qq * c.alpha / (two * c.z3 * c.z3));
  });
  each("sep_same_all", [&](const Corner& c) {
    return detail::lt(two * c2 * detail::cpow(c.zmax / two, r0), qq * c.alpha / (c.zmax * c.zmax));
  });
  rep.certify("c1_rho", [&] { return detail::le(c1 * F.R1, F.rho / CertifiedReal(4)); });
  each("packing_same", [&](const Corner& c) {
    return detail::lt(two * c4 * detail::cpow(c.zmax / two, pe), qq * c.alpha / (c.zmax * c.zmax));
  });
  CertifiedReal rp_max = c4 * detail::cpow(F.zmin_all, pe);
  rep.certify("packing_cross", [&] { return detail::lt(two * (c1 * F.R1 + rp_max), F.rho); });
  rep.certify("packing_parent",
              [&] { return detail::le(F.dmax + c1 * F.R1 + rp_max, CertifiedReal(node.packing_radius)); });
  CertifiedReal shrink(Rational(1 - 1 / rpow(Rational(2), 60)));
  each("packing_contain_all", [&](const Corner& c) {
    return detail::le(c2 * detail::cpow(c.z3, r0), half * c4 * shrink * detail::cpow(c.z3, pe));
  });
  each("qmu_all", [&](const Corner& c) { return detail::le(qq * c.alpha, detail::cpow(c.z3, 1 - P.mu)); });
  rep.certify("ball_parent_all", [&] {
    return detail::le(F.dmax + c1 * F.R1 + c2 * detail::cpow(F.zmin_all, r0), CertifiedReal(node.radius));
  });
  if (node.bootstrap || !P.c3) {
    rep.exempt("sep_r2", "bootstrap-exempt");
  } else {
    rep.certify("sep_r2", [&] {
      return detail::le(CertifiedReal(*P.c3) * detail::cpow(qq, P.exps.r2), F.sep_min);
    });
  }
  return rep;
}

/** \brief c3 = power of two below half the least sep_min(z) / |z|^r2 over the given nodes. */
inline Rational calibrate_c3(const std::vector<const TreeNode*>& nodes, const TreeParams& P) {
  if (nodes.empty()) throw DepthInsufficient("c3 needs at least one depth-1 node");
  std::optional<CertifiedReal> best;
  for (const TreeNode* n : nodes) {
    FamilyData F = family_data(*n, P);
    CertifiedReal v = F.sep_min / detail::cpow(CertifiedReal(n->x.q()), P.exps.r2);
    best = best ? min(*best, v) : v;
  }
  return power_of_two_below(*best / CertifiedReal(2));
}

/** \brief Child z with its witness, before ids are assigned. */
inline TreeNode make_child(const TreeNode& parent, const AlphaWindow& w, const Integer& k, const D1Window& D,
                           const Integer& a, const Integer& kz, const TreeParams& P) {
  TreeNode c;
  c.x = make_primitive(D.point(a, kz));
  c.lattice = farey_lattice(c.x);
  c.parent = parent.id;
  c.depth = parent.depth + 1;
  c.witness = Witness{D.y, w.alpha, w.m, k, D.sub.lift, a, kz};
  auto [r, rp] = node_radii(c.x.q(), P);
  c.radius = r;
  c.packing_radius = rp;
  return c;
}

namespace detail {

/** \brief Up to `want` coprime pairs (a, k) of D1(y), a spread over +-[1, a_max], k near the middle. */
inline std::vector<std::pair<Integer, Integer>> pick_d1(const D1Window& D, std::size_t want) {
  std::vector<std::pair<Integer, Integer>> out;
  if (D.a_max < 1 || want == 0) return out;
  std::vector<Integer> mags;
  Integer amax = D.a_max;
  std::size_t h = (want + 1) / 2;
  if (amax <= Integer(static_cast<unsigned long>(h))) {
    for (Integer a = 1; a <= amax; ++a) mags.push_back(a);
  } else if (h == 1) {
    mags.push_back(1);
  } else {
    for (std::size_t i = 0; i < h; ++i) {
      Integer v = 1 + floor_div((amax - 1) * Integer(static_cast<unsigned long>(i)),
                                Integer(static_cast<unsigned long>(h - 1)));
      if (mags.empty() || mags.back() != v) mags.push_back(v);
    }
  }
  for (const Integer& mag : mags) {
    for (int sign : {1, -1}) {
      if (out.size() >= want) return out;
      Integer a = sign * mag;
      HeightWindow kr = D.k_range(a);
      if (kr.empty()) continue;
      Integer mid = floor_div(kr.lo + kr.hi, Integer(2));
      Integer reach = std::max(Integer(mid - kr.lo), Integer(kr.hi - mid));
      bool found = false;
      for (Integer off = 0; off <= reach && !found; ++off) {
        for (int dir : {1, -1}) {
          Integer cand = mid + dir * off;
          if (cand < kr.lo || cand > kr.hi) continue;
          if (gcd(a, cand) == 1) {
            out.push_back({a, cand});
            found = true;
            break;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/**
 * \brief Up to `cap` children of a node.
 *
 * Witnesses alpha_m are spread evenly over |m| <= M with y at mid-window;
 * children are taken round-robin across witnesses and sorted by (|z|, p1, p2).
 */
inline std::vector<TreeNode> children(const TreeNode& node, const TreeParams& P, std::size_t cap) {
  if (!P.resolved()) throw DomainError("constants are not resolved");
  Integer M = alpha_bound(node.lattice);
  Integer span = 2 * M + 1;
  std::size_t W = span < Integer(static_cast<unsigned long>(cap)) ? span.get_ui() : cap;
  std::vector<std::vector<TreeNode>> per;
  for (const Integer& m : detail::spread(M, W)) {
    AlphaWindow w = alpha_window(node.x, node.lattice, P, m);
    if (w.empty()) continue;
    std::vector<Integer> ks = {floor_div(w.k_lo + w.k_hi, Integer(2))};
    if (ks[0] != w.k_hi) ks.push_back(w.k_hi);
    for (const Integer& k : ks) {
      PrimitiveVector y = make_primitive(w.lift(k, node.x));
      D1Window D = d1_window(y, P);
      auto picks = detail::pick_d1(D, cap);
      if (picks.empty()) continue;
      std::vector<TreeNode> list;
      for (auto& [a, kz] : picks) list.push_back(make_child(node, w, k, D, a, kz, P));
      per.push_back(std::move(list));
      break;
    }
  }
  std::vector<TreeNode> out;
  for (std::size_t round = 0; out.size() < cap; ++round) {
    bool any = false;
    for (auto& list : per) {
      if (round < list.size() && out.size() < cap) {
        out.push_back(list[round]);
        any = true;
      }
    }
    if (!any) break;
  }
  if (out.empty()) throw HeightTooSmall("no admissible child at this height");
  std::sort(out.begin(), out.end(), [](const TreeNode& s, const TreeNode& t) {
    if (s.x.q() != t.x.q()) return s.x.q() < t.x.q();
    if (s.x.p1() != t.x.p1()) return s.x.p1() < t.x.p1();
    return s.x.p2() < t.x.p2();
  });
  return out;
}

/** \brief Build limits. */
struct BuildOptions {
  std::size_t depth = 0;
  std::size_t cap = 8;
  std::size_t budget = 100000;  ///< maximal number of nodes
  unsigned threads = 1;
  /** \brief Throw on a failed check instead of recording it. */
  bool strict = true;
};

/** \brief A built tree: nodes in breadth-first order, node 0 is the root. */
struct Tree {
  TreeParams params;
  BuildOptions options;
  Calibration calibration;
  std::vector<TreeNode> nodes;
  std::vector<NodeReport> node_reports;    ///< verify_node per node
  std::vector<NodeReport> family_reports;  ///< certify_family per interior node

  const TreeNode& root() const { return nodes.at(0); }
  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
  }
  std::vector<std::size_t> level(std::size_t d) const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes) {
      if (n.depth == d) out.push_back(n.id);
    }
    return out;
  }
  std::vector<std::size_t> leaves() const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes) {
      if (n.children.empty()) out.push_back(n.id);
    }
    return out;
  }
  /** \brief Node ids from the root down to id. */
  std::vector<std::size_t> path_to(std::size_t id) const {
    std::vector<std::size_t> p;
    for (std::optional<std::size_t> cur = id; cur; cur = nodes.at(*cur).parent) p.push_back(*cur);
    std::reverse(p.begin(), p.end());
    return p;
  }
  bool ok() const {
    auto good = [](const NodeReport& r) { return r.ok(); };
    return std::all_of(node_reports.begin(), node_reports.end(), good) &&
           std::all_of(family_reports.begin(), family_reports.end(), good);
  }
};

inline NodeReport verify_node(const Tree& t, std::size_t id) {
  const TreeNode& n = t.nodes.at(id);
  return verify_node(n, n.parent ? &t.nodes.at(*n.parent) : nullptr, t.params);
}

namespace detail {

inline void enforce(const NodeReport& r, bool strict, const char* what) {
  if (!strict || r.ok()) return;
  std::string names;
  for (const auto& f : r.failures()) names += (names.empty() ? "" : ",") + f;
  std::string msg = std::string(what) + " failed at node " + std::to_string(r.node) + ": " + names;
  if (std::string(what) == "family") throw HeightTooSmall(msg);
  throw InvariantViolation(msg);
}

template <class T, class F>
std::vector<T> map_parallel(std::size_t n, unsigned threads, F f) {
  std::vector<T> out(n);
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  for (std::size_t start = 0; start < n; start += threads) {
    std::vector<std::future<T>> fs;
    std::size_t end = std::min(n, start + threads);
    for (std::size_t i = start; i < end; ++i) fs.push_back(std::async(std::launch::async, f, i));
    for (std::size_t i = start; i < end; ++i) out[i] = fs[i - start].get();
  }
  return out;
}

}  // namespace detail

/**
 * \brief Breadth-limited expansion of the structure below a root.
 *
 * Unset constants are calibrated from the root generation (c3 from depth 1).
 * Every node gets verify_node and every interior node certify_family.
 */
inline Tree build_tree(const PrimitiveVector& root, const TreeParams& params, const BuildOptions& opt) {
  Tree t;
  t.options = opt;
  t.params = params;
  TreeNode r = make_root(root, params);
  if (opt.depth > 0) t.params = calibrate(params, r, &t.calibration);
  t.nodes.push_back(r);
  t.node_reports.push_back(verify_node(t, 0));
  detail::enforce(t.node_reports.back(), opt.strict, "node");

  std::vector<std::size_t> frontier = {0};
  for (std::size_t d = 0; d < opt.depth; ++d) {
    if (d == 1 && !t.params.c3) {
      std::vector<const TreeNode*> lvl;
      for (std::size_t id : frontier) lvl.push_back(&t.nodes[id]);
      t.params.c3 = calibrate_c3(lvl, t.params);
    }
    const TreeParams& P = t.params;
    struct Expansion {
      NodeReport family;
      std::vector<TreeNode> kids;
      bool truncated = false;
    };
    std::vector<Expansion> ex = detail::map_parallel<Expansion>(frontier.size(), opt.threads, [&](std::size_t i) {
      const TreeNode& n = t.nodes[frontier[i]];
      FamilyData F = family_data(n, P);
      Expansion e;
      e.family = certify_family(n, F, P);
      e.kids = children(n, P, opt.cap);
      e.truncated = true;
      return e;
    });
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      t.family_reports.push_back(ex[i].family);
      detail::enforce(ex[i].family, opt.strict, "family");
      std::size_t pid = frontier[i];
      t.nodes[pid].truncated = ex[i].truncated;
      for (auto& k : ex[i].kids) {
        if (t.nodes.size() >= opt.budget) throw BudgetExceeded("node budget exhausted");
        k.id = t.nodes.size();
        k.parent = pid;
        t.nodes[pid].children.push_back(k.id);
        next.push_back(k.id);
        t.nodes.push_back(std::move(k));
      }
    }
    std::vector<NodeReport> reps =
        detail::map_parallel<NodeReport>(next.size(), opt.threads, [&](std::size_t i) { return verify_node(t, next[i]); });
    for (auto& rep : reps) {
      t.node_reports.push_back(rep);
      detail::enforce(rep, opt.strict, "node");
    }
    frontier = std::move(next);
  }
  return t;
}

inline Tree build_tree(const PrimitiveVector& root, const TreeParams& params, std::size_t depth,
                       std::size_t budget = 100000, std::size_t cap = 8) {
  BuildOptions o;
  o.depth = depth;
  o.budget = budget;
  o.cap = cap;
  return build_tree(root, params, o);
}

/** \brief Pairwise checks among the present children of a node. */
inline NodeReport verify_siblings(const Tree& t, std::size_t id) {
  NodeReport rep;
  rep.node = id;
  const TreeNode& X = t.nodes.at(id);
  const TreeParams& P = t.params;
  bool disjoint = true, packing = true, separation = true, r2 = true;
  bool undecided = false;
  const auto& ch = X.children;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    for (std::size_t j = i + 1; j < ch.size(); ++j) {
      const TreeNode& A = t.nodes[ch[i]];
      const TreeNode& B = t.nodes[ch[j]];
      Rational d2 = dist_sq(A.x.point(), B.x.point());
      Rational s = A.radius + B.radius;
      Rational sp = A.packing_radius + B.packing_radius;
      disjoint = disjoint && s * s < d2;
      packing = packing && sp * sp < d2;
      try {
        if (A.witness && B.witness && A.witness->y == B.witness->y) {
          const Integer& y3 = A.witness->y.q();
          FareyLattice Ly = farey_lattice(A.witness->y);
          CertifiedReal bound = Ly.lambda1() / (CertifiedReal(2) * detail::cpow(CertifiedReal(y3), 1 + 2 * P.b));
          separation = separation && detail::le(bound, detail::csqrt_q(d2));
        }
        if (!X.bootstrap && P.c3) {
          CertifiedReal bound = CertifiedReal(*P.c3) * detail::cpow(CertifiedReal(X.x.q()), P.exps.r2);
          r2 = r2 && detail::le(bound, detail::csqrt_q(d2));
        }
      } catch (const TieBreak&) {
        undecided = true;
      }
    }
  }
  rep.add("sibling_disjoint", disjoint);
  rep.add("packing_disjoint", packing);
  rep.add("sibling_separation", separation && !undecided);
  if (X.bootstrap || !P.c3) rep.exempt("r2_separation", "bootstrap-exempt");
  else rep.add("r2_separation", r2 && !undecided);
  return rep;
}

/**
 * \brief Enclosure of the limit point below a path: the deepest center and ball radius,
 * re-verified to lie inside every ancestor ball.
 */
inline TargetPoint extract_point(const Tree& t, const std::vector<std::size_t>& path) {
  if (path.empty()) throw EmptyPath("empty path");
  for (std::size_t i = 1; i < path.size(); ++i) {
    const TreeNode& n = t.nodes.at(path[i]);
    if (!n.parent || *n.parent != path[i - 1]) throw EmptyPath("path is not a parent/child chain");
  }
  const TreeNode& last = t.nodes.at(path.back());
  Vec2 c = last.x.point();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const TreeNode& anc = t.nodes.at(path[i]);
    CertifiedReal d = detail::csqrt_q(dist_sq(c, anc.x.point()));
    if (!detail::le(d + CertifiedReal(last.radius), CertifiedReal(anc.radius))) {
      throw InvariantViolation("enclosure leaves an ancestor ball");
    }
  }
  return TargetPoint::enclosure(c, last.radius);
}

/** \brief Certified bounds on card sigma(x) and on log card / log |x|. */
struct CardEnclosure {
  CertifiedReal lo;
  CertifiedReal hi;
  CertifiedReal y_count_lo;
  CertifiedReal y_count_hi;
  std::optional<CertifiedReal> log_ratio_lo;  ///< absent when lo <= 0
  CertifiedReal log_ratio_hi;
};

/**
 * \brief card sigma(x) from lattice-point counts in the (a, z3) region of each D1(y).
 *
 * Per y: Area = c1 (Zhi^2 - Zlo^2) / y3^2, L = (Zhi - Zlo) / y3, A = c1 Zhi / y3 and
 * the primitive count lies in [0.355 Area - err, Area + L + 2A + 1] with
 * err = 2L + 2A + 2 + (L + 2A) ln max(A, 1) + max(A, 1).
 */
inline CardEnclosure card_sigma(const TreeNode& node, const TreeParams& P) {
  if (!P.c1) throw DomainError("c1 is not resolved");
  FamilyData F = family_data(node, P);
  CertifiedReal qq(node.x.q());
  CertifiedReal c1(*P.c1);
  CertifiedReal one(1), two(2);
  CertifiedReal n_alpha(Integer(2 * F.M + 1));
  CertifiedReal ytop = two * F.Ylo_max;
  auto yb = [&](const CertifiedReal& y) { return detail::cpow(y, P.b); };
  auto area = [&](const CertifiedReal& y) {
    CertifiedReal v = yb(y);
    return CertifiedReal(Rational(3, 4)) * c1 * v * v;
  };
  CertifiedReal L = yb(ytop) / two;
  CertifiedReal A = c1 * yb(ytop);
  CertifiedReal D = max(A, one);
  CertifiedReal err = two * L + two * A + two + (L + two * A) * log(D) + D;
  CertifiedReal p_lo = CertifiedReal(Rational(71, 200)) * area(F.Y0) - err;
  CertifiedReal p_hi = area(ytop) + L + two * A + one;
  CardEnclosure e;
  e.y_count_lo = n_alpha * (F.Y0 / qq - one);
  e.y_count_hi = n_alpha * (F.Ylo_max / qq + one);
  e.lo = e.y_count_lo * p_lo;
  e.hi = e.y_count_hi * p_hi;
  CertifiedReal lq = log(qq);
  if (compare(e.lo, CertifiedReal(1)) > 0) e.log_ratio_lo = log(e.lo) / lq;
  e.log_ratio_hi = log(e.hi) / lq;
  return e;
}

/** \brief Exact card sigma(x) = sum over E1(x) of card D1(y). */
inline Integer card_sigma_exact(const TreeNode& node, const TreeParams& P) {
  Integer total = 0;
  for_each_E1(node, P, [&](const AlphaWindow& w, const Integer& k) {
    total += count_D1(d1_window(make_primitive(w.lift(k, node.x)), P));
  });
  return total;
}

}  // namespace singvec
