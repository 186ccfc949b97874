#pragma once
/**
 * \file exponents.hpp
 * \brief Closed-form exponents and dimension bounds for planar singular vectors.
 *
 * Formulas are templates over the scalar type so the same expression serves
 * exact rationals, certified reals and doubles.
 */

#include <optional>
#include <string>
#include <vector>

#include "singvec/certified.hpp"
#include "singvec/errors.hpp"
#include "singvec/number.hpp"

namespace singvec {

/** \brief Throws DomainError unless 1/2 < mu < 1. */
inline void require_mu(const Rational& mu) {
  if (!(mu > Rational(1, 2) && mu < 1)) throw DomainError("mu must lie in (1/2, 1)");
}

inline void require_mu_b(const Rational& mu, const Rational& b) {
  require_mu(mu);
  if (!(b > 0)) throw DomainError("b must be positive");
}

/** \brief Whether mu^2 < 1/2, i.e. mu below the branch point sqrt(2)/2. */
inline bool below_branch_point(const Rational& mu) { return 2 * mu * mu < 1; }

/** \brief (3 - 2 mu)(1 - mu) / (mu^2 - mu + 1). */
template <class T>
T upper_bound_low_branch(const T& mu) {
  T one(1), two(2), three(3);
  return T(T((three - two * mu) * (one - mu)) / T(mu * mu - mu + one));
}

/** \brief 2 (1 - mu). */
template <class T>
T upper_bound_high_branch(const T& mu) {
  T one(1), two(2);
  return T(two * (one - mu));
}

/** \brief Upper bound for the Hausdorff dimension at exponent mu. */
inline CertifiedReal upper_bound_dim(const Rational& mu) {
  require_mu(mu);
  return below_branch_point(mu) ? upper_bound_low_branch(mu) : upper_bound_high_branch(mu);
}

/** \brief Branch chosen by certified comparison of mu^2 with 1/2; TieBreak at the branch point. */
inline CertifiedReal upper_bound_dim(const CertifiedReal& mu) {
  if (!(certified_less(CertifiedReal(Rational(1, 2)), mu) && certified_less(mu, CertifiedReal(1)))) {
    throw DomainError("mu must lie in (1/2, 1)");
  }
  return certified_less(mu * mu, CertifiedReal(Rational(1, 2))) ? upper_bound_low_branch(mu)
                                                                 : upper_bound_high_branch(mu);
}

/** \brief s1(mu, b) = (1-mu)(2b^2+2b mu+b+(2-mu)(2mu-1)) / ((b+2mu-1)(mu^2-mu+b+1)). */
template <class T>
T s1(const T& mu, const T& b) {
  T one(1), two(2);
  T num = (one - mu) * (two * b * b + two * b * mu + b + (two - mu) * (two * mu - one));
  T den = (b + two * mu - one) * (mu * mu - mu + b + one);
  return T(num / den);
}

/** \brief s2(mu, b) = ((2-mu)(2mu-1) + b) / (2mu + b mu - 1). */
template <class T>
T s2(const T& mu, const T& b) {
  T one(1), two(2);
  T num = (two - mu) * (two * mu - one) + b;
  T den = two * mu + b * mu - one;
  return T(num / den);
}

/**
 * \brief Numerator of d s1 / d b:
 * (1-mu)((2mu^2-1) b^2 + (8mu^3-8mu^2+2mu) b + (6mu^4-7mu^3+3mu-1)).
 */
template <class T>
T s1_derivative_numerator(const T& mu, const T& b) {
  T one(1), two(2), three(3), six(6), seven(7), eight(8);
  T m2 = mu * mu, m3 = m2 * mu, m4 = m3 * mu;
  T poly = (two * m2 - one) * b * b + (eight * m3 - eight * m2 + two * mu) * b + (six * m4 - seven * m3 + three * mu - one);
  return T((one - mu) * poly);
}

/** \brief s1, s2 and their difference at a rational point. */
struct S12 {
  Rational s1;
  Rational s2;
  Rational diff;
};

inline S12 s1_s2(const Rational& mu, const Rational& b) {
  require_mu_b(mu, b);
  S12 r{s1(mu, b), s2(mu, b), 0};
  r.diff = r.s2 - r.s1;
  if (!(r.diff > 0)) throw InvariantViolation("s2 - s1 is not positive");
  return r;
}

/** \brief Maximizer of b -> s1(mu, b) for mu^2 < 1/2. */
inline CertifiedReal b0(const Rational& mu) {
  require_mu(mu);
  if (!below_branch_point(mu)) throw DomainError("b0 requires mu < sqrt(2)/2");
  Rational om = 1 - mu;
  Rational rad = om * om * om * (2 * mu - 1) * (2 * mu - 2 * mu * mu + 1);
  CertifiedReal v = (CertifiedReal(Rational(mu - 4 * mu * mu + 4 * mu * mu * mu)) + sqrt(CertifiedReal(rad))) /
                    CertifiedReal(Rational(1 - 2 * mu * mu));
  Interval ni = s1_derivative_numerator(CertifiedReal(mu), v).enclose(256);
  if (!ni.contains_zero()) throw InvariantViolation("b0 enclosure does not bracket a root of the derivative");
  return v;
}

/** \brief Simplest rational within tol of b0(mu). */
inline Rational b0_rational(const Rational& mu, const Rational& tol = Rational(1, 1000000)) {
  CertifiedReal v = b0(mu);
  return simplest_rational_between(v.lower(256) - tol, v.upper(256) + tol);
}

/** \brief Lower bound for the Hausdorff dimension: s1(mu, b0) below sqrt(2)/2, else 2(1-mu). */
inline CertifiedReal lower_bound_dim(const Rational& mu) {
  require_mu(mu);
  if (!below_branch_point(mu)) return Rational(2 * (1 - mu));
  return s1(CertifiedReal(mu), b0(mu));
}

/** \brief p(mu, b) = (2b^2+2b mu+b+(2-mu)(2mu-1)) / ((mu+1+2b)(b+2mu-1)). */
template <class T>
T packing_profile(const T& mu, const T& b) {
  T one(1), two(2);
  T num = two * b * b + two * b * mu + b + (two - mu) * (two * mu - one);
  T den = (mu + one + two * b) * (b + two * mu - one);
  return T(num / den);
}

/** \brief Numerator of d p / d b: (6mu-4) b^2 + 4(2mu-1)^2 b + (2mu-1)(7mu^2-8mu+3). */
template <class T>
T packing_derivative_numerator(const T& mu, const T& b) {
  T one(1), two(2), three(3), four(4), six(6), seven(7), eight(8);
  T t = two * mu - one;
  return T((six * mu - four) * b * b + four * t * t * b + t * (seven * mu * mu - eight * mu + three));
}

/** \brief Supremum of the packing profile over b > 0. */
struct PackingBound {
  CertifiedReal value;
  /** \brief False when the supremum is the limit 1 as b grows. */
  bool attained = false;
  std::optional<CertifiedReal> argmax;
};

inline PackingBound packing_bound(const Rational& mu) {
  require_mu(mu);
  PackingBound r;
  if (3 * mu >= 2) {
    r.value = CertifiedReal(1);
    r.attained = false;
    return r;
  }
  Rational a = 4 - 6 * mu, t = 2 * mu - 1;
  Rational c = t * (7 * mu * mu - 8 * mu + 3);
  Rational lin = 4 * t * t;
  CertifiedReal bstar = (CertifiedReal(lin) + sqrt(CertifiedReal(Rational(lin * lin + 4 * a * c)))) / CertifiedReal(Rational(2 * a));
  r.argmax = bstar;
  r.value = packing_profile(CertifiedReal(mu), bstar);
  r.attained = true;
  return r;
}

/** \brief Exponents of the self-similar construction at (mu, b). */
struct NodeExponents {
  Rational r0, e_y, e_z, h, v, r1, r2, r3, n_x, d1, e1;
};

inline NodeExponents node_exponents(const Rational& mu, const Rational& b) {
  require_mu_b(mu, b);
  Rational om = 1 - mu, bp = b + 1;
  NodeExponents e;
  e.r0 = -(mu * mu - mu + b + 1) / (om * bp);
  e.e_y = (mu + b) / (om * bp);
  e.e_z = bp * e.e_y;
  e.h = -(2 - mu) * (b + mu) / (om * bp);
  e.v = -(1 + mu) * (b + mu) / (om * bp);
  e.r1 = e.v;
  e.r2 = -(mu + 1 + 2 * b) * (b + mu) / (om * bp);
  e.r3 = (mu + b) / om * e.r0;
  e.n_x = (2 * b * b + 2 * b * mu + b + (2 * mu - 1) * (2 - mu)) / (om * bp);
  e.d1 = 2 * b * e.e_y;
  e.e1 = 2 * (mu - 1) / bp + e.e_y;
  if (!(e.r0 > e.h && e.h > e.v && e.v > e.r2 && e.r2 > e.r3)) {
    throw InvariantViolation("exponent ordering r0 > h > v > r2 > r3 fails");
  }
  return e;
}

/** \brief w -> 1 - 1/w for w >= 2. */
inline Rational jarnik_transfer(const Rational& w) {
  if (w < 2) throw DomainError("transfer requires w >= 2");
  return 1 - 1 / w;
}

/** \brief Value of the transfer at w = infinity. */
inline Rational jarnik_transfer_at_infinity() { return Rational(1); }

/** \brief Inverse transfer v -> 1 / (1 - v) for v in [1/2, 1). */
inline Rational jarnik_inverse(const Rational& v) {
  if (!(v >= Rational(1, 2) && v < 1)) throw DomainError("inverse transfer requires v in [1/2, 1)");
  return 1 / (1 - v);
}

/** \brief Exponent gamma of the refined covering and the critical t. */
struct UpperGamma {
  Rational gamma;
  Rational t_crit;
};

inline UpperGamma upper_gamma(const Rational& mu) {
  require_mu(mu);
  if (!below_branch_point(mu)) throw DomainError("gamma requires mu < sqrt(2)/2");
  return {(1 - 2 * mu * mu) / (mu * (1 - mu) * (3 - 2 * mu)), (3 - 2 * mu) / (1 - mu + mu * mu)};
}

/**
 * \brief Exponents of the covering sum at (mu, gamma) and dimension parameter t:
 * a = (1-gamma) mu t, b = (1 + gamma (mu-1) mu) t, A = (b-1)/(1-mu) - a - 2,
 * B = mu (b-1)/(1-mu) - a - 1 + b.
 */
struct CoveringExponents {
  Rational a, b, A, B;
};

inline CoveringExponents covering_exponents(const Rational& mu, const Rational& gamma, const Rational& t) {
  CoveringExponents c;
  c.a = (1 - gamma) * mu * t;
  c.b = (1 + gamma * (mu - 1) * mu) * t;
  c.A = (c.b - 1) / (1 - mu) - c.a - 2;
  c.B = mu * (c.b - 1) / (1 - mu) - c.a - 1 + c.b;
  return c;
}

/** \brief tau = (mu^2 - mu + b + 1) / ((1-mu)(b+1)) - 1, which equals |r0| - 1. */
template <class T>
T remark_tau(const T& mu, const T& b) {
  T one(1);
  return T(T(mu * mu - mu + b + one) / T((one - mu) * (b + one)) - one);
}

/** \brief Reference dimension bounds at exponent tau > 2. */
struct BakerBounds {
  Rational baker_lower;    ///< 2 / tau
  Rational baker_upper;    ///< 6 / (tau + 1)
  Rational dodson_upper;   ///< 3 tau / (tau^2 - tau + 1)
  Rational laurent_upper;  ///< (2 tau + 2) / (tau^2 - tau + 1)
};

inline BakerBounds baker_bounds(const Rational& tau) {
  if (!(tau > 2)) throw DomainError("tau must exceed 2");
  Rational d = tau * tau - tau + 1;
  return {2 / tau, 6 / (tau + 1), 3 * tau / d, (2 * tau + 2) / d};
}

/** \brief Bounds transferred to exponent mu >= 1/2: 2(1-mu) and 3(1-mu)/(mu^2-mu+1). */
struct TransferredBounds {
  Rational lower;
  Rational upper;
};

inline TransferredBounds transferred_bounds(const Rational& mu) {
  if (!(mu >= Rational(1, 2) && mu < 1)) throw DomainError("mu must lie in [1/2, 1)");
  return {2 * (1 - mu), 3 * (1 - mu) / (mu * mu - mu + 1)};
}

/** \brief One row of the formula table. */
struct FormulaRow {
  Rational mu;
  CertifiedReal upper;
  CertifiedReal lower;
  CertifiedReal packing;
  bool packing_attained;
  std::optional<CertifiedReal> b0;
  std::optional<Rational> gamma;
  CertifiedReal tau;
};

inline FormulaRow formula_row(const Rational& mu) {
  require_mu(mu);
  PackingBound pb = packing_bound(mu);
  FormulaRow r{mu, upper_bound_dim(mu), lower_bound_dim(mu), pb.value, pb.attained, std::nullopt, std::nullopt,
               CertifiedReal(0)};
  if (below_branch_point(mu)) {
    r.b0 = b0(mu);
    r.gamma = upper_gamma(mu).gamma;
    r.tau = remark_tau(CertifiedReal(mu), *r.b0);
  } else {
    r.tau = CertifiedReal(Rational(mu / (1 - mu)));
  }
  return r;
}

/** \brief Rows for mu = lo, lo + step, ... <= hi. */
inline std::vector<FormulaRow> formula_table(const Rational& lo, const Rational& hi, const Rational& step) {
  if (!(step > 0)) throw DomainError("step must be positive");
  std::vector<FormulaRow> rows;
  for (Rational mu = lo; mu <= hi; mu += step) rows.push_back(formula_row(mu));
  return rows;
}

}  // namespace singvec
