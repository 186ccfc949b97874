#pragma once
/**
 * \file best_approx.hpp
 * \brief Best simultaneous approximations of planar targets and their diagnostics.
 *
 * Records are found by enumerating the rank-3 lattice of pairs (p, q) inside
 * the ellipsoid |q theta - p|^2 / r^2 + q^2 / Q^2 <= 2, which contains every
 * candidate with q <= Q and distance below the current record r. This is
 * exact and equivalent to a scan over q, but independent of the gap sizes.
 */

#include <optional>
#include <string>
#include <vector>

#include "singvec/certified.hpp"
#include "singvec/errors.hpp"
#include "singvec/lattice3.hpp"
#include "singvec/number.hpp"
#include "singvec/rational_geometry.hpp"

namespace singvec {

/** \brief Exact rational pair (radius 0) or a closed disc enclosure. */
struct TargetPoint {
  Vec2 center;
  Rational radius = 0;

  static TargetPoint exact(const Vec2& c) { return {c, 0}; }
  static TargetPoint enclosure(const Vec2& c, const Rational& r) {
    if (r < 0) throw DomainError("negative enclosure radius");
    return {c, r};
  }
  bool is_exact() const { return radius == 0; }
};

/** \brief One record: x_n = (p_n, q_n) and r_n^2 = dist(q_n theta, Z^2)^2. */
struct ApproxRecord {
  PrimitiveVector x;
  Rational rn_sq;
};

/** \brief Record list of a target up to a height bound. */
struct BestApproxSequence {
  TargetPoint theta;
  std::vector<ApproxRecord> records;
  Integer qmax;
  /** \brief The target is rational and a record with distance 0 was reached. */
  bool terminal = false;
};

namespace detail {

/** \brief Nearest integer point to q * c, halves rounded down, and the squared distance. */
inline std::pair<std::array<Integer, 2>, Rational> nearest_integer_point(const Integer& q, const Vec2& c) {
  Rational a = q * c.a, b = q * c.b;
  Integer p1 = round_half_down(a), p2 = round_half_down(b);
  Rational d1 = a - p1, d2 = b - p2;
  return {{p1, p2}, d1 * d1 + d2 * d2};
}

inline Gram3 record_gram(const Vec2& c, const Rational& r_sq, const Integer& Q) {
  Rational S = 1 / r_sq;
  Rational T = Rational(1) / (Rational(Q) * Q);
  Gram3 G{};
  G[0][0] = S;
  G[1][1] = S;
  G[0][1] = G[1][0] = 0;
  G[0][2] = G[2][0] = -S * c.a;
  G[1][2] = G[2][1] = -S * c.b;
  G[2][2] = S * (c.a * c.a + c.b * c.b) + T;
  return G;
}

struct Candidate {
  Integer p1, p2, q;
  Rational d_sq;
};

/**
 * \brief All (p, q) with q in (q_lo, Q] and |q c - p|^2 < r_sq.
 */
inline std::vector<Candidate> candidates_below(const Vec2& c, const Rational& r_sq, const Integer& q_lo,
                                               const Integer& Q) {
  std::vector<Candidate> out;
  if (Q <= q_lo) return out;
  Gram3 G = record_gram(c, r_sq, Q);
  enumerate_short_vectors(G, Rational(2), [&](const Coord3& v) {
    if (v[2] <= q_lo || v[2] > Q) return;
    Rational d1 = v[2] * c.a - v[0], d2 = v[2] * c.b - v[1];
    Rational d = d1 * d1 + d2 * d2;
    if (d < r_sq) out.push_back({v[0], v[1], v[2], d});
  });
  return out;
}

/** \brief Smallest q above q_n with distance below r_n, with tie-broken p. */
inline std::optional<Candidate> next_record(const Vec2& c, const Integer& qn, const Rational& rn_sq,
                                            const Integer& qmax) {
  Integer Q = qn * 8;
  if (Q > qmax) Q = qmax;
  Integer lo = qn;
  for (;;) {
    std::vector<Candidate> cands = candidates_below(c, rn_sq, lo, Q);
    std::optional<Candidate> best;
    for (auto& cd : cands) {
      if (!best || cd.q < best->q || (cd.q == best->q && cd.d_sq < best->d_sq) ||
          (cd.q == best->q && cd.d_sq == best->d_sq &&
           (cd.p1 < best->p1 || (cd.p1 == best->p1 && cd.p2 < best->p2)))) {
        best = cd;
      }
    }
    if (best) return best;
    if (Q >= qmax) return std::nullopt;
    lo = Q;
    Q *= 8;
    if (Q > qmax) Q = qmax;
  }
}

inline CertifiedReal csqrt(const Rational& r) { return sqrt(CertifiedReal(r)); }

/** \brief The nearest integer point to q c must not change across the enclosure. */
inline void certify_nearest_point(const Vec2& c, const Integer& q, const std::array<Integer, 2>& p,
                                  const Rational& d_sq, const Rational& rho) {
  CertifiedReal reach = csqrt(d_sq) + CertifiedReal(Rational(2 * q * rho));
  for (long i = -2; i <= 2; ++i) {
    for (long j = -2; j <= 2; ++j) {
      if (i == 0 && j == 0) continue;
      Rational e1 = q * c.a - (p[0] + i), e2 = q * c.b - (p[1] + j);
      if (!certified_less(reach, csqrt(e1 * e1 + e2 * e2))) {
        throw EnclosureTooCoarse("nearest integer point is not stable across the enclosure");
      }
    }
  }
}

/** \brief No q in (q_lo, q_hi] with distance below r + 2 q_hi rho at the center. */
inline void certify_gap(const Vec2& c, const Rational& r_sq, const Integer& q_lo, const Integer& q_hi,
                        const Rational& rho) {
  if (q_hi <= q_lo) return;
  // (r + delta)^2 <= r^2 + 2 delta u + delta^2 for any rational u >= r
  Rational delta = 2 * q_hi * rho;
  Rational u = csqrt(r_sq).upper(64);
  Rational bound = r_sq + 2 * delta * u + delta * delta;
  if (!candidates_below(c, bound, q_lo, q_hi).empty()) {
    throw EnclosureTooCoarse("a non-record height may become a record inside the enclosure");
  }
}

}  // namespace detail

/**
 * \brief Complete best-approximation record list of theta up to qmax.
 *
 * For an enclosure every record and every skipped height is certified for
 * all points of the disc; otherwise EnclosureTooCoarse is thrown.
 */
inline BestApproxSequence best_sequence(const TargetPoint& theta, const Integer& qmax) {
  if (qmax < 1) throw DomainError("qmax must be positive");
  BestApproxSequence seq;
  seq.theta = theta;
  seq.qmax = qmax;
  const Vec2& c = theta.center;
  const Rational& rho = theta.radius;
  auto [p0, d0] = detail::nearest_integer_point(Integer(1), c);
  if (rho > 0) detail::certify_nearest_point(c, 1, p0, d0, rho);
  seq.records.push_back({make_primitive(p0[0], p0[1], 1), d0});
  if (d0 == 0) {
    if (rho > 0) throw EnclosureTooCoarse("enclosure center is an integer point");
    seq.terminal = true;
    return seq;
  }
  for (;;) {
    const ApproxRecord& last = seq.records.back();
    Integer qn = last.x.q();
    Rational rn_sq = last.rn_sq;
    if (qn >= qmax) break;
    std::optional<detail::Candidate> nx = detail::next_record(c, qn, rn_sq, qmax);
    if (!nx) {
      if (rho > 0) detail::certify_gap(c, rn_sq, qn, qmax, rho);
      break;
    }
    if (rho > 0) {
      if (nx->d_sq == 0) throw EnclosureTooCoarse("record distance vanishes at the enclosure center");
      CertifiedReal lhs = detail::csqrt(nx->d_sq) + CertifiedReal(Rational(nx->q * rho));
      CertifiedReal rhs = detail::csqrt(rn_sq) - CertifiedReal(Rational(qn * rho));
      if (!certified_less(lhs, rhs)) throw EnclosureTooCoarse("record improvement not decided");
      detail::certify_gap(c, rn_sq, qn, nx->q - 1, rho);
      detail::certify_nearest_point(c, nx->q, {nx->p1, nx->p2}, nx->d_sq, rho);
    }
    seq.records.push_back({make_primitive(nx->p1, nx->p2, nx->q), nx->d_sq});
    if (nx->d_sq == 0) {
      seq.terminal = true;
      break;
    }
  }
  return seq;
}

enum class LegendreClass { inner, outer, between };

inline std::string to_string(LegendreClass c) {
  switch (c) {
    case LegendreClass::inner: return "inner";
    case LegendreClass::outer: return "outer";
    default: return "between";
  }
}

/**
 * \brief Position of theta relative to the closed ball B(x-hat, lambda1/(2|x|))
 * and the open ball B(x-hat, 2 lambda1/|x|).
 */
inline LegendreClass legendre_classify(const PrimitiveVector& x, const FareyLattice& L, const TargetPoint& theta) {
  Rational d_sq = dist_sq(x.point(), theta.center);
  Rational q_sq = Rational(x.q() * x.q());
  Rational inner_sq = L.lam1_sq / (4 * q_sq);
  Rational outer_sq = 4 * L.lam1_sq / q_sq;
  if (theta.is_exact()) {
    if (d_sq <= inner_sq) return LegendreClass::inner;
    if (d_sq >= outer_sq) return LegendreClass::outer;
    return LegendreClass::between;
  }
  CertifiedReal d = detail::csqrt(d_sq);
  CertifiedReal rho(theta.radius);
  CertifiedReal ri = detail::csqrt(inner_sq), ro = detail::csqrt(outer_sq);
  auto leq = [](const CertifiedReal& a, const CertifiedReal& b) {
    return a.is_exact() && b.is_exact() ? a.exact_value() <= b.exact_value() : certified_less(a, b);
  };
  if (leq(d + rho, ri)) return LegendreClass::inner;
  if (leq(ro, d - rho)) return LegendreClass::outer;
  if (certified_less(d + rho, ro) && certified_less(ri, d - rho)) return LegendreClass::between;
  throw EnclosureTooCoarse("enclosure straddles a classification boundary");
}

inline LegendreClass legendre_classify(const PrimitiveVector& x, const TargetPoint& theta) {
  return legendre_classify(x, farey_lattice(x), theta);
}

/** \brief One failed inequality of the best-approximation checks. */
struct Bai3Violation {
  std::string check;
  std::size_t n;
  std::size_t other;
};

struct Bai3Report {
  std::size_t checked = 0;
  std::vector<Bai3Violation> violations;
  bool clean() const { return violations.empty(); }
};

/**
 * \brief Checks (i) |x_n - x_{n+1}| < 4 lambda1(x_{n+1}) / |x_n|,
 * (ii) |x_n - x_{n+k}| < 4 lambda1(x_n) / |x_n| for all k, and
 * (iii) |p - q theta| / 2 <= |p - q x_n| <= 2 |p - q theta| for earlier records (p, q).
 */
inline Bai3Report verify_bai3(const BestApproxSequence& seq) {
  Bai3Report rep;
  const auto& R = seq.records;
  std::size_t N = R.size();
  if (N < 2) return rep;
  std::vector<FareyLattice> lat;
  lat.reserve(N);
  for (const auto& r : R) lat.push_back(farey_lattice(r.x));
  std::vector<Vec2> pts;
  for (const auto& r : R) pts.push_back(r.x.point());
  for (std::size_t n = 0; n + 1 < N; ++n) {
    Rational qn_sq = Rational(R[n].x.q() * R[n].x.q());
    ++rep.checked;
    if (!(dist_sq(pts[n], pts[n + 1]) < 16 * lat[n + 1].lam1_sq / qn_sq)) rep.violations.push_back({"i", n, n + 1});
    for (std::size_t k = n + 1; k < N; ++k) {
      ++rep.checked;
      if (!(dist_sq(pts[n], pts[k]) < 16 * lat[n].lam1_sq / qn_sq)) rep.violations.push_back({"ii", n, k});
    }
  }
  const Vec2& c = seq.theta.center;
  const Rational& rho = seq.theta.radius;
  for (std::size_t n = 1; n < N; ++n) {
    for (std::size_t m = 0; m < n; ++m) {
      const PrimitiveVector& y = R[m].x;
      Rational a1 = Rational(y.p1()) - y.q() * c.a, a2 = Rational(y.p2()) - y.q() * c.b;
      Rational b1 = Rational(y.p1()) - y.q() * pts[n].a, b2 = Rational(y.p2()) - y.q() * pts[n].b;
      Rational A = a1 * a1 + a2 * a2, B = b1 * b1 + b2 * b2;
      ++rep.checked;
      bool ok;
      if (rho == 0) {
        ok = B <= 4 * A && A <= 4 * B;
      } else {
        CertifiedReal a = detail::csqrt(A), b = detail::csqrt(B), spread(Rational(y.q() * rho));
        ok = certified_less_equal(b, 2 * (a - spread)) && certified_less_equal(a + spread, 2 * b);
      }
      if (!ok) rep.violations.push_back({"iii", n, m});
    }
  }
  return rep;
}

/** \brief One row of a uniform-exponent profile. */
struct ExponentRow {
  Integer Q;
  Rational best_dist_sq;
  /** \brief -log D(Q) / log Q; empty when D(Q) = 0 or Q = 1. */
  std::optional<CertifiedReal> estimate;
  bool infinite = false;
  /** \brief Minimum of the estimates over this and all later grid points. */
  std::optional<CertifiedReal> tail_inf;
};

/** \brief D(Q)^2 = min over q <= Q of dist(q theta, Z^2)^2. */
inline Rational best_dist_sq(const BestApproxSequence& seq, const Integer& Q) {
  if (Q < 1 || Q > seq.qmax) throw DomainError("Q outside [1, qmax]");
  Rational d = seq.records.front().rn_sq;
  for (const auto& r : seq.records) {
    if (r.x.q() > Q) break;
    d = r.rn_sq;
  }
  return d;
}

inline std::vector<ExponentRow> exponent_profile(const BestApproxSequence& seq, const std::vector<Integer>& Qgrid) {
  std::vector<ExponentRow> rows;
  for (const Integer& Q : Qgrid) {
    ExponentRow row;
    row.Q = Q;
    row.best_dist_sq = best_dist_sq(seq, Q);
    if (row.best_dist_sq == 0) {
      row.infinite = true;
    } else if (Q > 1) {
      row.estimate = -log(CertifiedReal(row.best_dist_sq)) / (2 * log(CertifiedReal(Q)));
    }
    rows.push_back(row);
  }
  std::optional<CertifiedReal> run;
  for (std::size_t i = rows.size(); i-- > 0;) {
    if (rows[i].estimate) run = run ? min(*run, *rows[i].estimate) : *rows[i].estimate;
    rows[i].tail_inf = run;
  }
  return rows;
}

/** \brief Per-record singularity checks at exponent mu. */
struct WitnessRow {
  std::size_t n;
  bool lambda1_ok;
  bool middle_lower_ok;
  bool middle_upper_ok;
  bool ok() const { return lambda1_ok && middle_lower_ok && middle_upper_ok; }
};

/** \brief |x|^(-2 mu) as a certified real. */
inline CertifiedReal height_power_sq(const Integer& q, const Rational& mu) {
  return pow(CertifiedReal(q), CertifiedReal(Rational(-2 * mu)));
}

/**
 * \brief lambda1(x_n) <= |x_n|^(-mu) and
 * lambda1(x_n) <= |q_{n-1} x_n - p_{n-1}| <= |x_n|^(-mu) for n in [n_from, n_to].
 */
inline std::vector<WitnessRow> singular_witness(const BestApproxSequence& seq, const Rational& mu, std::size_t n_from,
                                                std::size_t n_to) {
  std::vector<WitnessRow> rows;
  const auto& R = seq.records;
  if (R.empty()) return rows;
  n_to = std::min(n_to, R.size() - 1);
  for (std::size_t n = std::max<std::size_t>(n_from, 1); n <= n_to; ++n) {
    FareyLattice L = farey_lattice(R[n].x);
    CertifiedReal bound = height_power_sq(R[n].x.q(), mu);
    Vec2 xn = R[n].x.point();
    const PrimitiveVector& y = R[n - 1].x;
    Rational m1 = y.q() * xn.a - y.p1(), m2 = y.q() * xn.b - y.p2();
    Rational mid = m1 * m1 + m2 * m2;
    WitnessRow row{n, certified_less_equal(CertifiedReal(L.lam1_sq), bound), L.lam1_sq <= mid,
                   certified_less_equal(CertifiedReal(mid), bound)};
    rows.push_back(row);
  }
  return rows;
}

/** \brief Result of checking D(Q) <= Q^(-mu) on a height range. */
struct UniformBoundReport {
  bool ok = true;
  std::size_t segments = 0;
  std::optional<Integer> first_failure;
};

/**
 * \brief Checks D(Q) <= Q^(-mu) for all integers Q in [Q_lo, Q_hi]; per record
 * segment only the largest Q needs checking.
 */
inline UniformBoundReport uniform_bound_check(const BestApproxSequence& seq, const Rational& mu, const Integer& Q_lo,
                                              const Integer& Q_hi) {
  UniformBoundReport rep;
  const auto& R = seq.records;
  for (std::size_t n = 0; n < R.size(); ++n) {
    Integer seg_lo = R[n].x.q();
    Integer seg_hi = n + 1 < R.size() ? Integer(R[n + 1].x.q() - 1) : seq.qmax;
    if (seg_hi < Q_lo || seg_lo > Q_hi) continue;
    Integer Q = seg_hi < Q_hi ? seg_hi : Q_hi;
    ++rep.segments;
    if (R[n].rn_sq == 0) continue;
    if (!certified_less_equal(CertifiedReal(R[n].rn_sq), height_power_sq(Q, mu))) {
      rep.ok = false;
      if (!rep.first_failure) rep.first_failure = Q;
    }
  }
  return rep;
}

}  // namespace singvec
