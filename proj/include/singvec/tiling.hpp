#pragma once
/**
 * \file tiling.hpp
 * \brief Distorted tiling of B(x) by the trapezoids T(m, a) of the first-level points.
 */

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "singvec/cantor_tree.hpp"

namespace singvec {

/**
 * \brief Trapezoid T(m, a) with vertices x + alpha_m/(a q), x + alpha_{m+1}/(a q),
 * x + alpha_{m+1}/((a+1) q), x + alpha_m/((a+1) q).
 */
struct TilingCell {
  Integer m;
  Integer a;
  std::array<Vec2, 4> vertices;
  std::optional<PrimitiveVector> y;  ///< the E1 point indexing the cell
};

/** \brief Cells, axiom checks and the scales H, V and rho of one node. */
struct TilingReport {
  std::vector<TilingCell> cells;
  std::optional<Integer> cells_total;  ///< card E1(x), when the family is enumerable
  NodeReport checks;
  CertifiedReal H;       ///< lambda1 / Y0
  CertifiedReal V;       ///< 1 / (lambda1 Y0^2)
  CertifiedReal rho_lo;  ///< lower bound on rho(x)
  CertifiedReal rho_hi;  ///< distance of an explicit pair, an upper bound on rho(x)
  bool rho_exact = false;
};

/** \brief Band constant of rho(x) against V: V / k <= rho <= k V. */
inline constexpr long kRhoBand = 32;

namespace detail {

inline Vec2 alpha_m(const FareyLattice& L, const Integer& m) { return m * L.u1 + L.u2; }

inline TilingCell make_cell(const TreeNode& node, const Integer& m, const Integer& a) {
  const FareyLattice& L = node.lattice;
  const Integer& q = node.x.q();
  Vec2 c = node.x.point();
  Vec2 am = alpha_m(L, m), an = alpha_m(L, Integer(m + 1));
  Rational ta = Rational(1) / Rational(a * q), tb = Rational(1) / Rational((a + 1) * q);
  return {m, a, {c + ta * am, c + ta * an, c + tb * an, c + tb * am}, std::nullopt};
}

inline Rational polygon_area2(const std::vector<Vec2>& p) {
  Rational s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += det(p[i], p[(i + 1) % p.size()]);
  return s;
}

/** \brief Intersection of convex polygons by Sutherland-Hodgman clipping; exact. */
inline std::vector<Vec2> clip_convex(std::vector<Vec2> subject, std::vector<Vec2> clip) {
  if (polygon_area2(clip) < 0) std::reverse(clip.begin(), clip.end());
  for (std::size_t i = 0; i < clip.size() && !subject.empty(); ++i) {
    Vec2 A = clip[i], B = clip[(i + 1) % clip.size()];
    auto side = [&](const Vec2& P) { return det(B - A, P - A); };
    std::vector<Vec2> out;
    for (std::size_t j = 0; j < subject.size(); ++j) {
      Vec2 P = subject[j], Q = subject[(j + 1) % subject.size()];
      Rational sp = side(P), sq = side(Q);
      if (sp >= 0) out.push_back(P);
      if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
        Rational t = sp / (sp - sq);
        out.push_back(P + t * (Q - P));
      }
    }
    subject = std::move(out);
  }
  return subject;
}

/** \brief Area of the intersection of two convex cells. */
inline Rational overlap_area(const TilingCell& s, const TilingCell& t) {
  std::vector<Vec2> p = clip_convex({s.vertices.begin(), s.vertices.end()}, {t.vertices.begin(), t.vertices.end()});
  if (p.size() < 3) return 0;
  return abs(polygon_area2(p)) / 2;
}

}  // namespace detail

/**
 * \brief Distorted H x V tiling of B(x).
 *
 * Materialized cells (at most cell_limit; evenly spaced windows when there are more
 * windows than cells) get exact checks; the whole family gets structural bounds over a in [y_lo/q, y_hi/q] and
 * |m| <= M + 1. Frame: horizontal <u1, v>/lambda1, vertical det(u1, v)/lambda1.
 */
inline TilingReport tiling(const TreeNode& node, const TreeParams& P, std::size_t cell_limit = 4096) {
  TilingReport T;
  T.checks.node = node.id;
  const FareyLattice& L = node.lattice;
  const Integer& q = node.x.q();
  FamilyData F = family_data(node, P);
  CertifiedReal C0(P.tiling_c0);
  CertifiedReal lam1 = L.lambda1();
  CertifiedReal lam1_sq(L.lam1_sq);
  T.H = lam1 / F.Y0;
  T.V = CertifiedReal(1) / (lam1 * F.Y0 * F.Y0);
  if (F.enumerable) T.cells_total = count_E1(node, P);

  Integer M = F.M;
  Integer span = 2 * M + 1;
  Integer limit(static_cast<unsigned long>(std::max<std::size_t>(cell_limit, 2)));
  Integer per = std::max(Integer(1), Integer(limit / span));
  std::vector<Integer> ms;
  if (span <= limit) {
    for (Integer m = -M; m <= M; ++m) ms.push_back(m);
  } else {
    for (Integer i = 0; i < limit; ++i) ms.push_back(-M + floor_div(i * (span - 1), limit - 1));
  }
  for (const Integer& m : ms) {
    AlphaWindow w = alpha_window(node.x, L, P, m);
    for (Integer k = w.k_lo; k <= w.k_hi && k < w.k_lo + per; ++k) {
      if (T.cells.size() >= cell_limit) break;
      PrimitiveVector y = make_primitive(w.lift(k, node.x));
      TilingCell c = detail::make_cell(node, m, floor_div(y.q(), q));
      c.y = y;
      T.cells.push_back(c);
    }
  }

  Rational r_sq = node.ball_radius_sq();
  Vec2 xh = node.x.point();
  bool contain = true, side = true, overlap = true;
  bool inner = true, outer = true;
  // Rational enclosures of the thresholds; the per-cell tests are then exact and sufficient.
  Rational need_w_hi = (lam1_sq / (C0 * F.Y0)).upper();
  Rational need_h_hi = (CertifiedReal(1) / (C0 * F.Y0 * F.Y0)).upper();
  Rational out_w_lo = (C0 * lam1_sq / F.Y0).lower();
  Rational out_h_lo = (C0 / (F.Y0 * F.Y0)).lower();
  auto kappa = [&](const Integer& m) -> Rational { return dot(L.u1, detail::alpha_m(L, m)) * q; };
  auto level = [&](const Integer& a) -> Rational { return Rational(1) / (Rational(a) * q * q); };
  for (const TilingCell& c : T.cells) {
    for (const Vec2& v : c.vertices) contain = contain && dist_sq(v, xh) <= r_sq;
    if (c.y) {
      Vec2 d = c.y->point() - xh;
      Vec2 am = detail::alpha_m(L, c.m);
      Rational t = am.a != 0 ? d.a / am.a : d.b / am.b;
      side = side && d == t * am && t >= Rational(1) / Rational((c.a + 1) * q) && t <= Rational(1) / Rational(c.a * q);
    }
    TilingCell right = detail::make_cell(node, Integer(c.m + 1), c.a);
    TilingCell up = detail::make_cell(node, c.m, Integer(c.a + 1));
    overlap = overlap && detail::overlap_area(c, right) == 0 && detail::overlap_area(c, up) == 0;

    Rational k0 = kappa(c.m), k1 = kappa(Integer(c.m + 1));
    Rational w_hi = level(c.a), w_lo = level(Integer(c.a + 1));
    Rational w_mid = (w_hi + w_lo) / 2;
    auto width = [&](const Rational& lo, const Rational& hi) -> Rational {
      return std::min(Rational(k1 * lo), Rational(k1 * hi)) - std::max(Rational(k0 * lo), Rational(k0 * hi));
    };
    Rational full = width(w_lo, w_hi), half = width(w_mid, w_hi);
    Rational us[4] = {k0 * w_hi, k1 * w_hi, k1 * w_lo, k0 * w_lo};
    Rational umax = *std::max_element(us, us + 4), umin = *std::min_element(us, us + 4);
    bool ok_full = need_w_hi <= full && need_h_hi <= w_hi - w_lo;
    bool ok_half = need_w_hi <= half && need_h_hi <= w_hi - w_mid;
    inner = inner && (ok_full || ok_half);
    outer = outer && umax - umin <= out_w_lo && w_hi - w_lo <= out_h_lo;
  }
  for (std::size_t i = 1; i < T.cells.size(); ++i) {
    if (T.cells[i].m == T.cells[i - 1].m) overlap = overlap && detail::overlap_area(T.cells[i], T.cells[i - 1]) == 0;
  }
  T.checks.add("cells_contained", contain);
  T.checks.add("witness_on_side", side);
  T.checks.add("cells_overlap_zero", overlap);
  T.checks.add("inner_rectangle", inner);
  T.checks.add("outer_rectangle", outer);

  Integer a_lo = floor_div(F.y_lo, q), a_hi = floor_div(F.y_hi, q);
  T.checks.add("orientation", det(L.u1, L.u2) == Rational(1) / Rational(q) &&
                                  det(detail::alpha_m(L, Integer(0)), detail::alpha_m(L, Integer(1))) ==
                                      Rational(-1) / Rational(q));
  Rational amax_sq = 0, kmax = 0;
  for (const Integer& m : {Integer(-M), Integer(M + 1)}) {
    amax_sq = std::max(amax_sq, norm_sq(detail::alpha_m(L, m)));
    kmax = std::max(kmax, Rational(abs(kappa(m))));
  }
  T.checks.add("family_contained", amax_sq / (Rational(a_lo) * a_lo * q * q) <= r_sq);
  Rational d_hi = level(a_lo) - level(Integer(a_lo + 1));
  Rational d_lo = level(a_hi) - level(Integer(a_hi + 1));
  Rational gap = L.lam1_sq * q;
  Rational w_full = gap * level(Integer(a_hi + 1)) - 2 * kmax * d_hi;
  Rational w_half = gap * (level(Integer(a_hi + 1)) + d_lo / 2) - kmax * d_hi;
  Rational w_out = gap * level(a_lo) + 2 * kmax * d_hi;
  T.checks.certify("family_inner", [&] {
    CertifiedReal need_w = lam1_sq / (C0 * F.Y0);
    CertifiedReal need_h = CertifiedReal(1) / (C0 * F.Y0 * F.Y0);
    return (detail::le(need_w, CertifiedReal(w_full)) && detail::le(need_h, CertifiedReal(d_lo))) ||
           (detail::le(need_w, CertifiedReal(w_half)) && detail::le(need_h, CertifiedReal(Rational(d_lo / 2))));
  });
  T.checks.certify("family_outer", [&] {
    return detail::le(CertifiedReal(w_out), C0 * lam1_sq / F.Y0) &&
           detail::le(CertifiedReal(d_hi), C0 / (F.Y0 * F.Y0));
  });

  T.rho_lo = F.rho;
  T.rho_exact = F.rho_exact;
  AlphaWindow w0 = alpha_window(node.x, L, P, Integer(0));
  if (w0.k_hi > w0.k_lo) {
    Integer y1 = w0.base.q + w0.k_lo * q;
    T.rho_hi = detail::csqrt_q(Rational(q) * q * w0.alpha_sq / (Rational(y1) * y1 * (y1 + q) * (y1 + q)));
  } else {
    T.rho_hi = F.rho;
  }
  if (T.rho_exact) T.rho_hi = T.rho_lo;
  T.checks.certify("rho_band", [&] {
    CertifiedReal k(kRhoBand);
    return detail::le(T.V, k * T.rho_lo) && detail::le(T.rho_hi, k * T.V);
  });
  return T;
}

}  // namespace singvec
