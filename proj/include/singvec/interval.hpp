#pragma once
/**
 * \file interval.hpp
 * \brief Closed intervals with MPFR endpoints and outward rounding.
 */

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <string>
#include <utility>

#include "singvec/errors.hpp"
#include "singvec/number.hpp"

namespace singvec {

/** \brief Owning wrapper around an mpfr_t. */
class Float {
 public:
  explicit Float(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec); }
  Float(const Float& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Float(Float&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Float& operator=(const Float& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Float& operator=(Float&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Float() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

  /** \brief Exact rational value of a finite float. */
  Rational to_rational() const {
    if (!mpfr_number_p(v_)) throw DomainError("non-finite float");
    if (mpfr_zero_p(v_)) return Rational(0);
    Integer m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    Rational r(m);
    if (e >= 0) {
      mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    } else {
      mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    }
    return r;
  }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

/** \brief Closed interval [lo, hi] of reals, both ends MPFR floats. */
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 64) : lo_(prec), hi_(prec) {
    mpfr_set_zero(lo_.get(), 1);
    mpfr_set_zero(hi_.get(), 1);
  }

  static Interval point(const Rational& q, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_q(r.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  static Interval hull(const Rational& a, const Rational& b, mpfr_prec_t prec) {
    Interval r(prec);
    const Rational& lo = a < b ? a : b;
    const Rational& hi = a < b ? b : a;
    mpfr_set_q(r.lo_.get(), lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.get(), hi.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  mpfr_prec_t prec() const { return lo_.prec(); }
  const Float& lo() const { return lo_; }
  const Float& hi() const { return hi_; }
  Float& lo() { return lo_; }
  Float& hi() { return hi_; }

  bool positive() const { return mpfr_sgn(lo_.get()) > 0; }
  bool negative() const { return mpfr_sgn(hi_.get()) < 0; }
  bool contains_zero() const { return !positive() && !negative(); }

  Rational lower() const { return lo_.to_rational(); }
  Rational upper() const { return hi_.to_rational(); }

  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval operator-(const Interval& a) {
    Interval r(a.prec());
    mpfr_neg(r.lo_.get(), a.hi_.get(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval operator*(const Interval& a, const Interval& b) {
    return combine(a, b, mpfr_mul);
  }

  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DomainError("interval division by an interval containing zero");
    return combine(a, b, mpfr_div);
  }

  friend Interval sqrt(const Interval& a) {
    if (a.negative()) throw DomainError("sqrt of negative interval");
    Interval r(a.prec());
    if (mpfr_sgn(a.lo_.get()) <= 0) {
      mpfr_set_zero(r.lo_.get(), 1);
    } else {
      mpfr_sqrt(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
    }
    mpfr_sqrt(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval log(const Interval& a) {
    if (!a.positive()) throw DomainError("log of non-positive interval");
    Interval r(a.prec());
    mpfr_log(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
    mpfr_log(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval exp(const Interval& a) {
    Interval r(a.prec());
    mpfr_exp(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
    mpfr_exp(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  /** \brief a^e for a strictly positive base. */
  friend Interval pow(const Interval& a, const Interval& e) { return exp(e * log(a)); }

  /** \brief Interval hull of two intervals. */
  friend Interval hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval min(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_min(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval max(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval abs(const Interval& a) {
    if (a.positive()) return a;
    if (a.negative()) return -a;
    Interval r(a.prec());
    mpfr_set_zero(r.lo_.get(), 1);
    Float t(a.prec());
    mpfr_neg(t.get(), a.lo_.get(), MPFR_RNDU);
    mpfr_max(r.hi_.get(), t.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  static Interval pi(mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_const_pi(r.lo_.get(), MPFR_RNDD);
    mpfr_const_pi(r.hi_.get(), MPFR_RNDU);
    return r;
  }

 private:
  using BinOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

  static Interval combine(const Interval& a, const Interval& b, BinOp op) {
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Interval r(p);
    Float t(p);
    const Float* as[2] = {&a.lo_, &a.hi_};
    const Float* bs[2] = {&b.lo_, &b.hi_};
    bool first = true;
    for (const Float* x : as) {
      for (const Float* y : bs) {
        op(t.get(), x->get(), y->get(), MPFR_RNDD);
        if (first || mpfr_less_p(t.get(), r.lo_.get())) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
        op(t.get(), x->get(), y->get(), MPFR_RNDU);
        if (first || mpfr_greater_p(t.get(), r.hi_.get())) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
        first = false;
      }
    }
    return r;
  }

  Float lo_;
  Float hi_;
};

}  // namespace singvec
