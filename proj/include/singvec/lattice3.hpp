#pragma once
/**
 * \file lattice3.hpp
 * \brief Exact LLL reduction and short-vector enumeration for rank-3 quadratic forms.
 *
 * A positive definite form is given by its rational Gram matrix G; vectors
 * are integer coordinate triples c with value c^T G c.
 */

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "singvec/errors.hpp"
#include "singvec/number.hpp"

namespace singvec {

using Gram3 = std::array<std::array<Rational, 3>, 3>;
using IntMat3 = std::array<std::array<Integer, 3>, 3>;
using Coord3 = std::array<Integer, 3>;

namespace detail {

/** \brief Gram matrix of the basis given by the columns of U. */
inline Gram3 transform_gram(const Gram3& G, const IntMat3& U) {
  Gram3 GU{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Rational s = 0;
      for (int k = 0; k < 3; ++k) s += G[i][k] * U[k][j];
      GU[i][j] = s;
    }
  Gram3 R{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Rational s = 0;
      for (int k = 0; k < 3; ++k) s += U[k][i] * GU[k][j];
      R[i][j] = s;
    }
  return R;
}

/** \brief Gram-Schmidt data: squared lengths B and coefficients mu[i][j], j < i. */
struct Gso {
  std::array<Rational, 3> B;
  std::array<std::array<Rational, 3>, 3> mu;
};

inline Gso gram_schmidt(const Gram3& G) {
  Gso g{};
  std::array<std::array<Rational, 3>, 3> r{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      Rational s = G[i][j];
      for (int k = 0; k < j; ++k) s -= g.mu[j][k] * r[i][k];
      r[i][j] = s;
      if (j < i) {
        if (r[j][j] == 0) throw DomainError("quadratic form is not positive definite");
        g.mu[i][j] = s / r[j][j];
      }
    }
    g.B[i] = r[i][i];
    if (g.B[i] <= 0) throw DomainError("quadratic form is not positive definite");
  }
  return g;
}

}  // namespace detail

/** \brief An LLL-reduced basis: columns of U in the original coordinates. */
struct ReducedForm {
  Gram3 gram;
  IntMat3 U;
};

/** \brief LLL reduction with delta = 3/4 on a positive definite rational Gram matrix. */
inline ReducedForm lll_reduce(const Gram3& G0) {
  IntMat3 U{};
  for (int i = 0; i < 3; ++i) U[i][i] = 1;
  Gram3 G = G0;
  const Rational delta(3, 4);
  int k = 1;
  int guard = 0;
  while (k < 3) {
    if (++guard > 100000) throw BudgetExceeded("LLL did not converge");
    for (int j = k - 1; j >= 0; --j) {
      detail::Gso g = detail::gram_schmidt(G);
      Integer c = round_half_up(g.mu[k][j]);
      if (c != 0) {
        for (int i = 0; i < 3; ++i) U[i][k] -= c * U[i][j];
        G = detail::transform_gram(G0, U);
      }
    }
    detail::Gso g = detail::gram_schmidt(G);
    if (g.B[k] >= (delta - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.B[k - 1]) {
      ++k;
    } else {
      for (int i = 0; i < 3; ++i) std::swap(U[i][k], U[i][k - 1]);
      G = detail::transform_gram(G0, U);
      k = std::max(k - 1, 1);
    }
  }
  return {G, U};
}

/**
 * \brief Calls visit(c) for every nonzero c in Z^3 with c^T G c <= bound.
 *
 * Coordinates are reported in the original basis. Enumeration is exact.
 */
inline void enumerate_short_vectors(const Gram3& G0, const Rational& bound,
                                    const std::function<void(const Coord3&)>& visit) {
  ReducedForm rf = lll_reduce(G0);
  detail::Gso g = detail::gram_schmidt(rf.gram);
  std::array<Integer, 3> x{};
  std::function<void(int, const Rational&)> rec = [&](int i, const Rational& used) {
    Rational c = 0;
    for (int j = i + 1; j < 3; ++j) c -= g.mu[j][i] * x[j];
    Rational rem = bound - used;
    if (rem < 0) return;
    Integer r = floor_sqrt(rem / g.B[i]);
    Integer fc = floor(c);
    Integer lo = fc - r - 1, hi = fc + r + 2;
    for (Integer v = lo; v <= hi; ++v) {
      Rational d = Rational(v) - c;
      Rational add = g.B[i] * d * d;
      if (used + add > bound) continue;
      x[i] = v;
      if (i == 0) {
        if (x[0] == 0 && x[1] == 0 && x[2] == 0) continue;
        Coord3 out;
        for (int a = 0; a < 3; ++a) out[a] = rf.U[a][0] * x[0] + rf.U[a][1] * x[1] + rf.U[a][2] * x[2];
        visit(out);
      } else {
        rec(i - 1, used + add);
      }
    }
    x[i] = 0;
  };
  rec(2, Rational(0));
}

}  // namespace singvec
