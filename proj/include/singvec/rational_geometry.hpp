#pragma once
/**
 * \file rational_geometry.hpp
 * \brief Primitive vectors, Farey lattices, wedge products and the plane H_x.
 *
 * For a primitive x = (p1, p2, q) the Farey lattice is the planar lattice
 * Lambda_x = Z^2 + Z * (p1/q, p2/q), the image of Z^3 under the projection
 * pi_x(m1, m2, n) = (m1, m2) - n * (p1/q, p2/q). All data are exact.
 */

#include <array>
#include <ostream>
#include <utility>
#include <vector>

#include "singvec/certified.hpp"
#include "singvec/errors.hpp"
#include "singvec/number.hpp"

namespace singvec {

/** \brief Planar vector with exact rational coordinates. */
struct Vec2 {
  Rational a;
  Rational b;

  friend Vec2 operator+(const Vec2& u, const Vec2& v) { return {u.a + v.a, u.b + v.b}; }
  friend Vec2 operator-(const Vec2& u, const Vec2& v) { return {u.a - v.a, u.b - v.b}; }
  friend Vec2 operator-(const Vec2& u) { return {-u.a, -u.b}; }
  friend Vec2 operator*(const Rational& s, const Vec2& v) { return {s * v.a, s * v.b}; }
  friend Vec2 operator*(const Integer& s, const Vec2& v) { return {s * v.a, s * v.b}; }
  friend bool operator==(const Vec2& u, const Vec2& v) { return u.a == v.a && u.b == v.b; }
  friend bool operator!=(const Vec2& u, const Vec2& v) { return !(u == v); }
};

inline Rational dot(const Vec2& u, const Vec2& v) { return u.a * v.a + u.b * v.b; }
inline Rational norm_sq(const Vec2& u) { return u.a * u.a + u.b * u.b; }
/** \brief det(u, v) = u.a * v.b - u.b * v.a. */
inline Rational det(const Vec2& u, const Vec2& v) { return u.a * v.b - u.b * v.a; }
inline Rational dist_sq(const Vec2& u, const Vec2& v) { return norm_sq(u - v); }

inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
  return os << "(" << to_string(v.a) << ", " << to_string(v.b) << ")";
}

/** \brief Integer 3-vector (m1, m2, n); the last entry is the height coordinate. */
struct IntVec3 {
  Integer p1;
  Integer p2;
  Integer q;

  friend IntVec3 operator+(const IntVec3& u, const IntVec3& v) { return {u.p1 + v.p1, u.p2 + v.p2, u.q + v.q}; }
  friend IntVec3 operator-(const IntVec3& u, const IntVec3& v) { return {u.p1 - v.p1, u.p2 - v.p2, u.q - v.q}; }
  friend IntVec3 operator-(const IntVec3& u) { return {-u.p1, -u.p2, -u.q}; }
  friend IntVec3 operator*(const Integer& s, const IntVec3& v) { return {s * v.p1, s * v.p2, s * v.q}; }
  friend bool operator==(const IntVec3& u, const IntVec3& v) { return u.p1 == v.p1 && u.p2 == v.p2 && u.q == v.q; }
  friend bool operator!=(const IntVec3& u, const IntVec3& v) { return !(u == v); }
};

inline std::ostream& operator<<(std::ostream& os, const IntVec3& v) {
  return os << "(" << v.p1 << ", " << v.p2 << ", " << v.q << ")";
}

/** \brief Determinant of the 3x3 integer matrix with rows a, b, c. */
inline Integer det3(const IntVec3& a, const IntVec3& b, const IntVec3& c) {
  return a.p1 * (b.p2 * c.q - b.q * c.p2) - a.p2 * (b.p1 * c.q - b.q * c.p1) + a.q * (b.p1 * c.p2 - b.p2 * c.p1);
}

/** \brief Element (p1, p2, q) with gcd 1 and q > 0, representing the point (p1/q, p2/q). */
class PrimitiveVector {
 public:
  PrimitiveVector() : p1_(0), p2_(0), q_(1) {}

  const Integer& p1() const { return p1_; }
  const Integer& p2() const { return p2_; }
  const Integer& q() const { return q_; }
  const Integer& height() const { return q_; }

  /** \brief The rational point x-hat. */
  Vec2 point() const { return {make_rational(p1_, q_), make_rational(p2_, q_)}; }
  IntVec3 vec() const { return {p1_, p2_, q_}; }

  friend bool operator==(const PrimitiveVector& a, const PrimitiveVector& b) {
    return a.p1_ == b.p1_ && a.p2_ == b.p2_ && a.q_ == b.q_;
  }
  friend bool operator!=(const PrimitiveVector& a, const PrimitiveVector& b) { return !(a == b); }

  friend PrimitiveVector make_primitive(const Integer& p1, const Integer& p2, const Integer& q);

 private:
  Integer p1_;
  Integer p2_;
  Integer q_;
};

inline std::ostream& operator<<(std::ostream& os, const PrimitiveVector& x) { return os << x.vec(); }

/** \brief Representative of the line through (p1, p2, q) with gcd 1 and q > 0. */
inline PrimitiveVector make_primitive(const Integer& p1, const Integer& p2, const Integer& q) {
  if (p1 == 0 && p2 == 0 && q == 0) throw ZeroVector();
  if (q == 0) throw DomainError("last coordinate must be nonzero");
  Integer g = gcd(gcd(p1, p2), q);
  if (q < 0) g = -g;
  PrimitiveVector x;
  x.p1_ = p1 / g;
  x.p2_ = p2 / g;
  x.q_ = q / g;
  return x;
}

inline PrimitiveVector make_primitive(const IntVec3& v) { return make_primitive(v.p1, v.p2, v.q); }

/** \brief pi_x(z) = (z1, z2) - z3 * x-hat. */
inline Vec2 project_along(const PrimitiveVector& x, const IntVec3& z) {
  Vec2 xh = x.point();
  return {Rational(z.p1) - z.q * xh.a, Rational(z.p2) - z.q * xh.b};
}

/** \brief Gauss-reduced basis of Lambda_x with preimages and exact squared minima. */
struct FareyLattice {
  PrimitiveVector owner;
  Vec2 u1;
  Vec2 u2;
  IntVec3 w1;
  IntVec3 w2;
  Rational lam1_sq;
  Rational lam2_sq;
  /** \brief True when Lambda_x has two non-parallel shortest vectors. */
  bool tied = false;

  Rational covolume() const { return abs(det(u1, u2)); }
  CertifiedReal lambda1() const { return sqrt(CertifiedReal(lam1_sq)); }
  CertifiedReal lambda2() const { return sqrt(CertifiedReal(lam2_sq)); }
  /** \brief Normalized minima q^(1/2) * lambda_i. */
  CertifiedReal normalized_lambda1() const { return sqrt(CertifiedReal(lam1_sq * owner.q())); }
  CertifiedReal normalized_lambda2() const { return sqrt(CertifiedReal(lam2_sq * owner.q())); }
};

namespace detail {

/** \brief Integer planar vector q * u together with a preimage in Z^3. */
struct TrackedVec {
  Integer a;
  Integer b;
  IntVec3 pre;

  Integer norm() const { return a * a + b * b; }
  Integer dot(const TrackedVec& o) const { return a * o.a + b * o.b; }
  TrackedVec minus(const Integer& k, const TrackedVec& o) const {
    return {a - k * o.a, b - k * o.b, pre - k * o.pre};
  }
  TrackedVec negated() const { return {-a, -b, -pre}; }
  TrackedVec plus(const TrackedVec& o) const { return {a + o.a, b + o.b, pre + o.pre}; }
};

/** \brief Euclid on one coordinate among the rows; leaves at most one row nonzero there. */
inline void eliminate(std::vector<TrackedVec>& rows, bool first) {
  auto coord = [first](const TrackedVec& v) -> const Integer& { return first ? v.a : v.b; };
  for (;;) {
    int piv = -1;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (coord(rows[i]) == 0) continue;
      if (piv < 0 || abs(coord(rows[i])) < abs(coord(rows[piv]))) piv = i;
    }
    if (piv < 0) return;
    bool changed = false;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == piv || coord(rows[i]) == 0) continue;
      Integer k = floor_div(coord(rows[i]), coord(rows[piv]));
      rows[i] = rows[i].minus(k, rows[piv]);
      changed = true;
    }
    if (!changed) return;
  }
}

/** \brief Lexicographic key (a^2, a, b) used to pick a canonical shortest vector. */
inline bool key_greater(const TrackedVec& u, const TrackedVec& v) {
  Integer ua = u.a * u.a, va = v.a * v.a;
  if (ua != va) return ua > va;
  if (u.a != v.a) return u.a > v.a;
  return u.b > v.b;
}

inline Integer det2(const TrackedVec& u, const TrackedVec& v) { return u.a * v.b - u.b * v.a; }

}  // namespace detail

/**
 * \brief Gauss-reduced basis of Lambda_x.
 *
 * The shortest vector maximizes (a^2, a, b) among all shortest vectors, so
 * the first coordinate is positive or, when zero, the second is. The second
 * vector is the completion with det(u1, u2) > 0 and
 * <u1, u2> in (-|u1|^2/2, |u1|^2/2]. Preimages have last coordinate in [0, q).
 */
inline FareyLattice farey_lattice(const PrimitiveVector& x) {
  using detail::TrackedVec;
  const Integer& q = x.q();
  std::vector<TrackedVec> rows = {
      {q, 0, {1, 0, 0}},
      {0, q, {0, 1, 0}},
      {x.p1(), x.p2(), {0, 0, -1}},
  };
  detail::eliminate(rows, true);
  std::vector<TrackedVec> basis;
  std::vector<TrackedVec> rest;
  for (auto& r : rows) {
    if (r.a != 0) basis.push_back(r);
    else rest.push_back(r);
  }
  detail::eliminate(rest, false);
  for (auto& r : rest) {
    if (r.b != 0) basis.push_back(r);
  }
  if (basis.size() != 2) throw InvariantViolation("Farey lattice basis construction failed");

  TrackedVec b1 = basis[0], b2 = basis[1];
  if (b2.norm() < b1.norm()) std::swap(b1, b2);
  for (;;) {
    Rational t(b1.dot(b2), b1.norm());
    t.canonicalize();
    Integer k = round_half_up(t);
    if (k != 0) b2 = b2.minus(k, b1);
    if (b2.norm() < b1.norm()) {
      std::swap(b1, b2);
    } else {
      break;
    }
  }

  Integer n1 = b1.norm();
  std::vector<std::pair<TrackedVec, TrackedVec>> cands;  // shortest vector, completion
  cands.push_back({b1, b2});
  cands.push_back({b1.negated(), b2});
  if (b2.norm() == n1) {
    cands.push_back({b2, b1});
    cands.push_back({b2.negated(), b1});
  }
  TrackedVec s = b1.plus(b2), d = b2.minus(1, b1);
  if (s.norm() == n1) {
    cands.push_back({s, b1});
    cands.push_back({s.negated(), b1});
  }
  if (d.norm() == n1) {
    cands.push_back({d, b1});
    cands.push_back({d.negated(), b1});
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (detail::key_greater(cands[i].first, cands[best].first)) best = i;
  }
  TrackedVec v1 = cands[best].first;
  TrackedVec v2 = cands[best].second;
  if (detail::det2(v1, v2) < 0) v2 = v2.negated();
  Rational t(v1.dot(v2), n1);
  t.canonicalize();
  Integer j = ceil(t - Rational(1, 2));
  if (j != 0) v2 = v2.minus(j, v1);

  auto normalize = [&x, &q](IntVec3 w) {
    Integer j2 = floor_div(w.q, q);
    if (j2 != 0) w = w - j2 * x.vec();
    return w;
  };

  FareyLattice L;
  L.owner = x;
  L.u1 = {make_rational(v1.a, q), make_rational(v1.b, q)};
  L.u2 = {make_rational(v2.a, q), make_rational(v2.b, q)};
  L.w1 = normalize(v1.pre);
  L.w2 = normalize(v2.pre);
  L.lam1_sq = norm_sq(L.u1);
  L.lam2_sq = norm_sq(L.u2);
  L.tied = cands.size() > 2;
  return L;
}

/** \brief Exact squared wedge |x ^ y|^2 = |(p1 v - u1 q, p2 v - u2 q)|^2 for x = (p, q), y = (u, v). */
inline Integer wedge_sq(const PrimitiveVector& x, const PrimitiveVector& y) {
  Integer c1 = x.p1() * y.q() - y.p1() * x.q();
  Integer c2 = x.p2() * y.q() - y.p2() * x.q();
  return c1 * c1 + c2 * c2;
}

/** \brief |x ^ y| = |x| |y| d(x-hat, y-hat). */
inline CertifiedReal wedge(const PrimitiveVector& x, const PrimitiveVector& y) {
  return sqrt(CertifiedReal(Rational(wedge_sq(x, y))));
}

/** \brief Generator of the rank-one sublattice Lambda_x intersected with H_x, and a lift. */
struct HSublattice {
  Vec2 generator;
  /** \brief y' with pi_x(y') = generator and last coordinate in (-q/2, q/2]. */
  IntVec3 lift;
};

/**
 * \brief The rank-one sublattice of Lambda_x of minimal covolume.
 *
 * Z^3 intersected with H_x is spanned by x and the returned lift.
 */
inline HSublattice sublattice_H(const PrimitiveVector& x, const FareyLattice& L) {
  IntVec3 w = L.w1;
  if (2 * w.q > x.q()) w = w - x.vec();
  return {L.u1, w};
}

inline HSublattice sublattice_H(const PrimitiveVector& x) { return sublattice_H(x, farey_lattice(x)); }

/** \brief Whether y-hat lies on the line x-hat + R u1. */
inline bool member_H(const PrimitiveVector& x, const FareyLattice& L, const PrimitiveVector& y) {
  return det(y.point() - x.point(), L.u1) == 0;
}

inline bool member_H(const PrimitiveVector& x, const PrimitiveVector& y) {
  return member_H(x, farey_lattice(x), y);
}

/** \brief Integer coordinates (s, t) with alpha = s u1 + t u2; throws NotPrimitive off the lattice. */
inline std::pair<Integer, Integer> lattice_coordinates(const FareyLattice& L, const Vec2& alpha) {
  Rational dd = det(L.u1, L.u2);
  Rational s = det(alpha, L.u2) / dd;
  Rational t = det(L.u1, alpha) / dd;
  if (s.get_den() != 1 || t.get_den() != 1) throw NotPrimitive("vector is not in the Farey lattice");
  return {s.get_num(), t.get_num()};
}

/** \brief Squared lambda_1 of the projected lattice: 1 / (|alpha|^2 q^2). */
inline Rational lambda1_alpha_sq(const PrimitiveVector& x, const FareyLattice& L, const Vec2& alpha) {
  auto [s, t] = lattice_coordinates(L, alpha);
  if (gcd(s, t) != 1) throw NotPrimitive("vector is not primitive in the Farey lattice");
  return 1 / (norm_sq(alpha) * x.q() * x.q());
}

/** \brief lambda_1 of pi_y(Z^3) for any primitive lift y of alpha: 1 / (|alpha| |x|). */
inline CertifiedReal lambda1_alpha(const PrimitiveVector& x, const FareyLattice& L, const Vec2& alpha) {
  return sqrt(CertifiedReal(lambda1_alpha_sq(x, L, alpha)));
}

}  // namespace singvec
