#pragma once
/**
 * \file number.hpp
 * \brief Exact integer and rational helpers over GMP.
 */

#include <gmpxx.h>

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "singvec/errors.hpp"

namespace singvec {

using Integer = mpz_class;
using Rational = mpq_class;

/** \brief Canonical rational n/d; throws DomainError when d is zero. */
inline Rational make_rational(const Integer& n, const Integer& d) {
  if (d == 0) throw DomainError("zero denominator");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Integer ceil_div(const Integer& a, const Integer& b) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

/** \brief Nonnegative remainder of a modulo b > 0. */
inline Integer mod_floor(const Integer& a, const Integer& b) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Integer floor(const Rational& r) {
  return floor_div(r.get_num(), r.get_den());
}

inline Integer ceil(const Rational& r) {
  return ceil_div(r.get_num(), r.get_den());
}

/** \brief Nearest integer, halves rounded down. */
inline Integer round_half_down(const Rational& r) {
  return ceil(r - Rational(1, 2));
}

/** \brief Nearest integer, halves rounded up. */
inline Integer round_half_up(const Rational& r) {
  return floor(r + Rational(1, 2));
}

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

/** \brief floor(sqrt(n)) for n >= 0. */
inline Integer isqrt(const Integer& n) {
  if (n < 0) throw DomainError("isqrt of negative integer");
  Integer r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

/** \brief floor(sqrt(r)) for rational r >= 0. */
inline Integer floor_sqrt(const Rational& r) {
  return isqrt(floor(r));
}

inline Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Rational rpow(const Rational& base, unsigned long e) {
  return Rational(ipow(base.get_num(), e), ipow(base.get_den(), e));
}

/** \brief floor(c^(1/n)) for c >= 0. */
inline Integer iroot(const Integer& c, unsigned long n) {
  if (c < 0 || n == 0) throw DomainError("iroot needs c >= 0 and n >= 1");
  Integer r;
  mpz_root(r.get_mpz_t(), c.get_mpz_t(), n);
  return r;
}

/** \brief Least Y >= 0 with Y^n >= c. */
inline Integer ceil_root(const Integer& c, unsigned long n) {
  if (c <= 0) return Integer(0);
  Integer r = iroot(c, n);
  if (ipow(r, n) < c) ++r;
  return r;
}

/** \brief Exact r-th root of a nonnegative rational when it is rational. */
inline std::optional<Rational> exact_root(const Rational& q, unsigned long r) {
  if (q < 0 || r == 0) return std::nullopt;
  Integer n, d;
  if (mpz_root(n.get_mpz_t(), q.get_num().get_mpz_t(), r) == 0) return std::nullopt;
  if (mpz_root(d.get_mpz_t(), q.get_den().get_mpz_t(), r) == 0) return std::nullopt;
  return Rational(n, d);
}

/** \brief Number of bits of |n|; zero for n = 0. */
inline std::size_t bit_length(const Integer& n) {
  return n == 0 ? 0 : mpz_sizeinbase(n.get_mpz_t(), 2);
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }
inline Integer abs(const Integer& n) { return n < 0 ? Integer(-n) : n; }

/**
 * \brief The rational with smallest denominator in the closed interval [lo, hi].
 */
inline Rational simplest_rational_between(Rational lo, Rational hi) {
  if (lo > hi) std::swap(lo, hi);
  if (lo <= 0 && hi >= 0) return Rational(0);
  bool neg = hi < 0;
  if (neg) {
    Rational t = -lo;
    lo = -hi;
    hi = t;
  }
  Integer fl = floor(lo);
  Rational r;
  if (Rational(fl) == lo) {
    r = Rational(fl);
  } else if (fl + 1 <= hi) {
    r = Rational(fl + 1);
  } else {
    Rational inner = simplest_rational_between(1 / (hi - fl), 1 / (lo - fl));
    r = Rational(fl) + 1 / inner;
  }
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

/** \brief Decimal string of an integer. */
inline std::string to_string(const Integer& n) { return n.get_str(10); }

/** \brief Rational as "num/den" (always with a denominator). */
inline std::string to_string(const Rational& r) {
  return r.get_num().get_str(10) + "/" + r.get_den().get_str(10);
}

/** \brief Parse a signed decimal integer. */
inline Integer parse_integer(std::string_view s) {
  std::string t(s);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  std::size_t i = 0;
  while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
  t = t.substr(i);
  if (t.empty()) throw ParseError("empty integer");
  std::size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (start == t.size()) throw ParseError("malformed integer: " + t);
  for (std::size_t k = start; k < t.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(t[k]))) throw ParseError("malformed integer: " + t);
  }
  if (t[0] == '+') t = t.substr(1);
  return Integer(t, 10);
}

/**
 * \brief Parse "n", "n/d", a decimal "1.25", or scientific "1e6" / "2.5e-3" exactly.
 */
inline Rational parse_rational(std::string_view s) {
  std::string t(s);
  if (t.empty()) throw ParseError("empty rational");
  auto slash = t.find('/');
  if (slash != std::string::npos) {
    Integer n = parse_integer(t.substr(0, slash));
    Integer d = parse_integer(t.substr(slash + 1));
    if (d == 0) throw ParseError("zero denominator: " + t);
    return make_rational(n, d);
  }
  std::string mant = t;
  long exp10 = 0;
  auto epos = t.find_first_of("eE");
  if (epos != std::string::npos) {
    mant = t.substr(0, epos);
    Integer e = parse_integer(t.substr(epos + 1));
    if (!e.fits_slong_p() || abs(e) > 100000) throw ParseError("exponent out of range: " + t);
    exp10 = e.get_si();
  }
  auto dot = mant.find('.');
  Integer num;
  long frac_digits = 0;
  if (dot == std::string::npos) {
    num = parse_integer(mant);
  } else {
    std::string ip = mant.substr(0, dot);
    std::string fp = mant.substr(dot + 1);
    for (char c : fp) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("malformed decimal: " + t);
    }
    bool neg = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip = ip.substr(1);
    if (ip.empty() && fp.empty()) throw ParseError("malformed decimal: " + t);
    std::string digits = (ip.empty() ? "0" : ip) + fp;
    num = parse_integer(digits);
    if (neg) num = -num;
    frac_digits = static_cast<long>(fp.size());
  }
  long shift = exp10 - frac_digits;
  Integer ten(10);
  if (shift >= 0) return Rational(num * ipow(ten, static_cast<unsigned long>(shift)));
  return make_rational(num, ipow(ten, static_cast<unsigned long>(-shift)));
}

}  // namespace singvec
