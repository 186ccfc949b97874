#pragma once
/**
 * \file certified.hpp
 * \brief Certified reals: exact rationals or lazily refinable interval enclosures.
 */

#include <mpfr.h>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "singvec/errors.hpp"
#include "singvec/interval.hpp"
#include "singvec/number.hpp"

namespace singvec {

inline constexpr mpfr_prec_t kDefaultPrecision = 128;
inline constexpr mpfr_prec_t kMaxPrecision = 1 << 17;

/**
 * \brief A real number known either exactly or through enclosures at any precision.
 *
 * Enclosures are produced on demand by an evaluator and cached per precision.
 * Arithmetic stays exact while both operands are exact rationals.
 */
class CertifiedReal {
 public:
  using Evaluator = std::function<Interval(mpfr_prec_t)>;

  CertifiedReal() : exact_(Rational(0)) {}
  CertifiedReal(const Rational& q) : exact_(q) {}  // NOLINT(google-explicit-constructor)
  CertifiedReal(const Integer& n) : exact_(Rational(n)) {}  // NOLINT(google-explicit-constructor)
  CertifiedReal(long n) : exact_(Rational(n)) {}  // NOLINT(google-explicit-constructor)
  CertifiedReal(int n) : exact_(Rational(n)) {}  // NOLINT(google-explicit-constructor)

  static CertifiedReal from_evaluator(Evaluator f) {
    CertifiedReal r;
    r.exact_.reset();
    r.state_ = std::make_shared<State>();
    r.state_->eval = std::move(f);
    return r;
  }

  bool is_exact() const { return exact_.has_value(); }
  const Rational& exact_value() const {
    if (!exact_) throw DomainError("certified real is not an exact rational");
    return *exact_;
  }

  /** \brief Enclosure at the given working precision. */
  Interval enclose(mpfr_prec_t prec) const {
    if (exact_) return Interval::point(*exact_, prec);
    std::lock_guard<std::mutex> lock(state_->mu);
    auto it = state_->cache.find(prec);
    if (it != state_->cache.end()) return it->second;
    Interval v = state_->eval(prec);
    state_->cache.emplace(prec, v);
    return v;
  }

  Rational lower(mpfr_prec_t prec = kDefaultPrecision) const {
    return exact_ ? *exact_ : enclose(prec).lower();
  }
  Rational upper(mpfr_prec_t prec = kDefaultPrecision) const {
    return exact_ ? *exact_ : enclose(prec).upper();
  }

  /** \brief Upper bound minus lower bound at the given precision. */
  Rational width(mpfr_prec_t prec = kDefaultPrecision) const {
    return exact_ ? Rational(0) : Rational(upper(prec) - lower(prec));
  }

  double approx() const {
    if (exact_) return exact_->get_d();
    Interval v = enclose(kDefaultPrecision);
    return 0.5 * (v.lo().to_double() + v.hi().to_double());
  }

  /** \brief Midpoint rendered with the given number of significant digits. */
  std::string decimal(int digits = 30) const {
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(digits * 4 + 64);
    Interval v = enclose(prec);
    Float mid(prec + 8);
    mpfr_add(mid.get(), v.lo().get(), v.hi().get(), MPFR_RNDN);
    mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
    if (mpfr_zero_p(mid.get())) return "0";
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits - 1, mid.get());
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

 private:
  struct State {
    Evaluator eval;
    std::map<mpfr_prec_t, Interval> cache;
    std::mutex mu;
  };

  std::optional<Rational> exact_;
  std::shared_ptr<State> state_;
};

namespace detail {

template <class Op>
CertifiedReal lift_binary(const CertifiedReal& a, const CertifiedReal& b, Op op) {
  return CertifiedReal::from_evaluator(
      [a, b, op](mpfr_prec_t p) { return op(a.enclose(p), b.enclose(p)); });
}

template <class Op>
CertifiedReal lift_unary(const CertifiedReal& a, Op op) {
  return CertifiedReal::from_evaluator([a, op](mpfr_prec_t p) { return op(a.enclose(p)); });
}

}  // namespace detail

inline CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) return Rational(a.exact_value() + b.exact_value());
  return detail::lift_binary(a, b, [](const Interval& x, const Interval& y) { return x + y; });
}

inline CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) return Rational(a.exact_value() - b.exact_value());
  return detail::lift_binary(a, b, [](const Interval& x, const Interval& y) { return x - y; });
}

inline CertifiedReal operator-(const CertifiedReal& a) {
  if (a.is_exact()) return Rational(-a.exact_value());
  return detail::lift_unary(a, [](const Interval& x) { return -x; });
}

inline CertifiedReal operator*(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) return Rational(a.exact_value() * b.exact_value());
  return detail::lift_binary(a, b, [](const Interval& x, const Interval& y) { return x * y; });
}

inline CertifiedReal operator/(const CertifiedReal& a, const CertifiedReal& b) {
  if (b.is_exact() && b.exact_value() == 0) throw DomainError("division by zero");
  if (a.is_exact() && b.is_exact()) return Rational(a.exact_value() / b.exact_value());
  return detail::lift_binary(a, b, [](const Interval& x, const Interval& y) { return x / y; });
}

inline CertifiedReal& operator+=(CertifiedReal& a, const CertifiedReal& b) { return a = a + b; }
inline CertifiedReal& operator-=(CertifiedReal& a, const CertifiedReal& b) { return a = a - b; }
inline CertifiedReal& operator*=(CertifiedReal& a, const CertifiedReal& b) { return a = a * b; }
inline CertifiedReal& operator/=(CertifiedReal& a, const CertifiedReal& b) { return a = a / b; }

/** \brief Square root; exact when the argument is the square of a rational. */
inline CertifiedReal sqrt(const CertifiedReal& a) {
  if (a.is_exact()) {
    const Rational& q = a.exact_value();
    if (q < 0) throw DomainError("sqrt of negative number");
    if (mpz_perfect_square_p(q.get_num().get_mpz_t()) && mpz_perfect_square_p(q.get_den().get_mpz_t())) {
      return Rational(isqrt(q.get_num()), isqrt(q.get_den()));
    }
  }
  return detail::lift_unary(a, [](const Interval& x) { return sqrt(x); });
}

inline CertifiedReal log(const CertifiedReal& a) {
  if (a.is_exact() && a.exact_value() == 1) return Rational(0);
  return detail::lift_unary(a, [](const Interval& x) { return log(x); });
}

inline CertifiedReal exp(const CertifiedReal& a) {
  if (a.is_exact() && a.exact_value() == 0) return Rational(1);
  return detail::lift_unary(a, [](const Interval& x) { return exp(x); });
}

/** \brief a^e for a > 0; exact whenever the base and exponent are exact and the result is rational. */
inline CertifiedReal pow(const CertifiedReal& a, const CertifiedReal& e) {
  if (e.is_exact() && e.exact_value() == 0) return Rational(1);
  if (a.is_exact() && e.is_exact() && a.exact_value() > 0) {
    const Rational& ev = e.exact_value();
    Integer n = abs(ev.get_num());
    const Integer& r = ev.get_den();
    const Rational& base = a.exact_value();
    if (n <= 4096 && r <= 4096 &&
        (bit_length(base.get_num()) + bit_length(base.get_den())) * n.get_ui() <= (std::size_t(1) << 20)) {
      Rational p = rpow(base, n.get_ui());
      std::optional<Rational> root = r == 1 ? std::optional<Rational>(p) : exact_root(p, r.get_ui());
      if (root) return ev < 0 ? Rational(1 / *root) : *root;
    }
  }
  return detail::lift_binary(a, e, [](const Interval& x, const Interval& y) { return pow(x, y); });
}

/**
 * \brief Sign of A^e - B for rationals A > 0, B >= 0 and rational e.
 *
 * Decided by enclosures when they separate and by exact integer powers otherwise.
 */
inline int compare_power(const Rational& A, const Rational& e, const Rational& B) {
  if (A <= 0) throw DomainError("compare_power needs a positive base");
  CertifiedReal lhs = pow(CertifiedReal(A), CertifiedReal(e));
  if (lhs.is_exact()) return cmp(lhs.exact_value(), B);
  for (mpfr_prec_t p : {kDefaultPrecision, mpfr_prec_t(512)}) {
    Interval x = lhs.enclose(p);
    Interval y = Interval::point(B, p);
    if (mpfr_less_p(x.hi().get(), y.lo().get())) return -1;
    if (mpfr_greater_p(x.lo().get(), y.hi().get())) return 1;
  }
  Integer n = e.get_num();
  unsigned long r = e.get_den().get_ui();
  Rational Br = rpow(B, r);
  if (n >= 0) return cmp(rpow(A, n.get_ui()), Br);
  return cmp(Rational(1), Br * rpow(A, Integer(-n).get_ui()));
}

inline CertifiedReal min(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) return a.exact_value() < b.exact_value() ? a : b;
  return detail::lift_binary(a, b, [](const Interval& x, const Interval& y) { return min(x, y); });
}

inline CertifiedReal max(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) return a.exact_value() < b.exact_value() ? b : a;
  return detail::lift_binary(a, b, [](const Interval& x, const Interval& y) { return max(x, y); });
}

inline CertifiedReal pi_real() {
  return CertifiedReal::from_evaluator([](mpfr_prec_t p) { return Interval::pi(p); });
}

/**
 * \brief Certified sign of a - b: -1, 0 or +1.
 *
 * Equality is only decided for two exact operands; otherwise refinement
 * continues up to kMaxPrecision and then TieBreak is thrown.
 */
inline int compare(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) return cmp(a.exact_value(), b.exact_value());
  for (mpfr_prec_t p = kDefaultPrecision; p <= kMaxPrecision; p *= 2) {
    Interval x = a.enclose(p);
    Interval y = b.enclose(p);
    if (mpfr_less_p(x.hi().get(), y.lo().get())) return -1;
    if (mpfr_greater_p(x.lo().get(), y.hi().get())) return 1;
  }
  throw TieBreak("certified comparison undecided at maximum precision");
}

inline bool certified_less(const CertifiedReal& a, const CertifiedReal& b) { return compare(a, b) < 0; }
inline bool certified_less_equal(const CertifiedReal& a, const CertifiedReal& b) {
  return compare(a, b) <= 0;
}

/** \brief floor of a certified real. */
inline Integer floor(const CertifiedReal& a) {
  if (a.is_exact()) return floor(a.exact_value());
  for (mpfr_prec_t p = kDefaultPrecision; p <= kMaxPrecision; p *= 2) {
    Interval x = a.enclose(p);
    Integer lo = floor(x.lower());
    if (lo == floor(x.upper())) return lo;
  }
  throw TieBreak("certified floor undecided at maximum precision");
}

inline Integer ceil(const CertifiedReal& a) { return -floor(-a); }

/** \brief Largest dyadic rational with 64-bit mantissa not exceeding a. */
inline Rational round_down_dyadic(const CertifiedReal& a, mpfr_prec_t bits = 64) {
  if (a.is_exact()) {
    Float f(bits);
    mpfr_set_q(f.get(), a.exact_value().get_mpq_t(), MPFR_RNDD);
    return f.to_rational();
  }
  Interval x = a.enclose(std::max<mpfr_prec_t>(bits * 2, kDefaultPrecision));
  Float f(bits);
  mpfr_set(f.get(), x.lo().get(), MPFR_RNDD);
  return f.to_rational();
}

/** \brief Largest power of two not exceeding a > 0. */
inline Rational power_of_two_below(const CertifiedReal& a) {
  Rational lo = a.lower(kDefaultPrecision * 2);
  if (lo <= 0) throw DomainError("power_of_two_below needs a positive lower bound");
  Float f(64);
  mpfr_set_q(f.get(), lo.get_mpq_t(), MPFR_RNDD);
  long e = mpfr_get_exp(f.get()) - 1;
  Rational r(1);
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return r;
}

}  // namespace singvec
