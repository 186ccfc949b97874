#pragma once
// Independent reference implementations used only by the tests.

#include <cmath>
#include <utility>
#include <vector>

#include "singvec/certified.hpp"
#include "singvec/rational_geometry.hpp"

namespace oracle {

using singvec::Integer;
using singvec::Rational;

/** Least common denominator of the coordinates of a planar vector. */
inline Integer lcm_den(const singvec::Vec2& v) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), v.a.get_den_mpz_t(), v.b.get_den_mpz_t());
  return l;
}

/**
 * Squared successive minima of Z^2 + Z x-hat by scanning n in [0, q) and the
 * nearest integer translates; every lattice vector is m - n x-hat.
 */
inline std::pair<Rational, Rational> brute_force_minima(const singvec::PrimitiveVector& x) {
  const Integer& q = x.q();
  struct V {
    Rational a, b, n;
  };
  std::vector<V> vs;
  long qq = q.get_si();
  for (long n = 0; n < qq; ++n) {
    Integer a0 = singvec::floor(Rational(n * x.p1(), q));
    Integer b0 = singvec::floor(Rational(n * x.p2(), q));
    for (long da = -1; da <= 2; ++da) {
      for (long db = -1; db <= 2; ++db) {
        Rational a = Rational(a0 + da) - Rational(n * x.p1(), q);
        Rational b = Rational(b0 + db) - Rational(n * x.p2(), q);
        if (a == 0 && b == 0) continue;
        vs.push_back({a, b, 0});
      }
    }
  }
  Rational best1 = -1;
  std::size_t i1 = 0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    Rational n = vs[i].a * vs[i].a + vs[i].b * vs[i].b;
    if (best1 < 0 || n < best1) {
      best1 = n;
      i1 = i;
    }
  }
  Rational best2 = -1;
  for (const auto& v : vs) {
    if (v.a * vs[i1].b - v.b * vs[i1].a == 0) continue;
    Rational n = v.a * v.a + v.b * v.b;
    if (best2 < 0 || n < best2) best2 = n;
  }
  return {best1, best2};
}

struct ScanRecord {
  Integer p1, p2, q;
  Rational d_sq;
};

/**
 * Naive best-approximation scan: every q from 1 to qmax, nearest integer point
 * per coordinate with halves rounded down, record on strict improvement.
 */
inline std::vector<ScanRecord> naive_scan(const Rational& t1, const Rational& t2, long qmax) {
  std::vector<ScanRecord> out;
  Rational best = -1;
  for (long q = 1; q <= qmax; ++q) {
    Rational a = q * t1, b = q * t2;
    Integer p1 = singvec::ceil(a - Rational(1, 2)), p2 = singvec::ceil(b - Rational(1, 2));
    Rational d1 = a - p1, d2 = b - p2;
    Rational d = d1 * d1 + d2 * d2;
    if (best < 0 || d < best) {
      best = d;
      out.push_back({p1, p2, Integer(q), d});
      if (d == 0) break;
    }
  }
  return out;
}

/**
 * E1(x) by scanning every height y3 <= H and every integer point near y3 x-hat:
 * primitive, first-level coordinates (m, 1) in the basis (u1, u2), |m u1| <= lambda2,
 * and (32 q |alpha|)^(1/(1-mu)) <= y3 <= 2 (32 q |alpha|)^(1/(1-mu)).
 */
inline std::vector<singvec::IntVec3> e1_scan(const singvec::PrimitiveVector& x, const singvec::FareyLattice& L,
                                             const Rational& mu, long H) {
  using namespace singvec;
  std::vector<IntVec3> out;
  Vec2 xh = x.point();
  const Integer& q = x.q();
  Integer R = isqrt(floor(Rational(4 * L.lam2_sq))) + 2;
  Rational dd = det(L.u1, L.u2);
  Rational e = 2 * (1 - mu);
  for (long y3 = 1; y3 <= H; ++y3) {
    Integer c1 = floor(Rational(y3 * xh.a)), c2 = floor(Rational(y3 * xh.b));
    for (Integer p1 = c1 - R; p1 <= c1 + R; ++p1) {
      for (Integer p2 = c2 - R; p2 <= c2 + R; ++p2) {
        if (gcd(gcd(p1, p2), Integer(y3)) != 1) continue;
        Vec2 alpha{Rational(p1) - y3 * xh.a, Rational(p2) - y3 * xh.b};
        Rational s = det(alpha, L.u2) / dd, t = det(L.u1, alpha) / dd;
        if (t != 1 || s.get_den() != 1) continue;
        if (s * s * L.lam1_sq > L.lam2_sq) continue;
        Rational B = Rational(1024) * q * q * norm_sq(alpha);
        if (compare_power(Rational(y3), e, B) < 0) continue;
        if (compare_power(Rational(y3, 2), e, B) > 0) continue;
        out.push_back({p1, p2, Integer(y3)});
      }
    }
  }
  return out;
}

/**
 * D1(y) by scanning every height z3 with z3 / y3 in [y3^b / 2, y3^b] and every integer
 * point of the plane spanned by y and (u_y, 0) within c1 lambda1(y) / y3 of y-hat.
 */
inline std::vector<singvec::IntVec3> d1_scan(const singvec::PrimitiveVector& y, const Rational& b, const Rational& c1) {
  using namespace singvec;
  FareyLattice Ly = farey_lattice(y);
  Vec2 u = Ly.u1;
  Integer den = lcm_den(u);
  Integer w1 = Integer(u.a * den), w2 = Integer(u.b * den);
  // normal n = y x (w1, w2, 0)
  Integer n1 = -y.q() * w2, n2 = y.q() * w1, n3 = y.p1() * w2 - y.p2() * w1;
  Integer g = gcd(gcd(n1, n2), n3);
  n1 /= g;
  n2 /= g;
  n3 /= g;
  Vec2 yh = y.point();
  const Integer& y3 = y.q();
  Rational lim = c1 * c1 * Ly.lam1_sq / (Rational(y3) * y3);
  // z3 <= y3^(1+b) <= 2 z3 as z3^r <= y3^n <= (2 z3)^r with 1 + b = n / r
  Rational e = 1 + b;
  unsigned long n = e.get_num().get_ui(), r = e.get_den().get_ui();
  Integer yn = ipow(y3, n);
  double top = std::pow(y3.get_d(), e.get_d()) + 2;
  std::vector<IntVec3> out;
  for (Integer z3 = y3; z3 <= Integer(top); ++z3) {
    if (ipow(z3, r) > yn) continue;
    if (ipow(Integer(2 * z3), r) < yn) continue;
    Integer rad = isqrt(ceil(Rational(lim * z3 * z3))) + 2;
    bool by_first = n2 != 0;
    Integer centre = by_first ? floor(Rational(z3 * yh.a)) : floor(Rational(z3 * yh.b));
    for (Integer v = centre - rad; v <= centre + rad; ++v) {
      Integer z1, z2;
      if (by_first) {
        Integer rhs = -n3 * z3 - n1 * v;
        if (rhs % n2 != 0) continue;
        z1 = v;
        z2 = rhs / n2;
      } else {
        Integer rhs = -n3 * z3 - n2 * v;
        if (rhs % n1 != 0) continue;
        z2 = v;
        z1 = rhs / n1;
      }
      if (gcd(gcd(z1, z2), z3) != 1) continue;
      Vec2 zh{Rational(z1, z3), Rational(z2, z3)};
      zh.a.canonicalize();
      zh.b.canonicalize();
      if (dist_sq(zh, yh) > lim) continue;
      out.push_back({z1, z2, z3});
    }
  }
  return out;
}

/** Denominators of the continued-fraction convergents of t > 0 up to qmax. */
inline std::vector<Integer> convergent_denominators(Rational t, const Integer& qmax) {
  std::vector<Integer> out;
  Integer qm2 = 0, qm1 = 1;
  for (int it = 0; it < 400; ++it) {
    Integer a = singvec::floor(t);
    Integer qk = a * qm1 + qm2;
    if (it == 0) qk = 1;
    if (qk > qmax) break;
    if (out.empty() || out.back() != qk) out.push_back(qk);
    if (it > 0) {
      qm2 = qm1;
      qm1 = qk;
    }
    Rational frac = t - a;
    if (frac == 0) break;
    t = 1 / frac;
  }
  return out;
}

}  // namespace oracle
