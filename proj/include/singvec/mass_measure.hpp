#pragma once
/**
 * \file mass_measure.hpp
 * \brief Mass distribution on the cylinder tree: child weights proportional to
 * (diam B(child))^s, with the per-node mass M(x) = sum of children's diam^s.
 */

#include <cstddef>
#include <optional>
#include <vector>

#include "singvec/cantor_tree.hpp"

namespace singvec {

/** \brief Weights and per-node masses of the cylinder measure at exponent s. */
struct CylinderMeasure {
  Rational s;
  std::vector<Rational> weight;                ///< per node id; root weight 1
  std::vector<std::optional<CertifiedReal>> M; ///< sum of (diam B(child))^s over present children
  std::vector<Rational> rounded_mass;          ///< sum of the dyadic child masses used for weights
  std::vector<bool> truncated;                 ///< children are a selection of sigma(x)
  std::vector<std::optional<bool>> mass_ok;    ///< M(x) >= (diam B(x))^s on present children
  std::vector<std::optional<bool>> family_mass_ok;  ///< the same bound for the full family
  bool additivity_ok = true;
  /** \brief Some interior node has M(x) < diam^s, so the cylinder bound is not guaranteed. */
  bool cylinder_flag = false;
  bool renormalized = false;  ///< weights were renormalized over a truncated child set
};

/** \brief (diam B(x))^s = (2 r)^s. */
inline CertifiedReal diam_power(const TreeNode& n, const Rational& s) {
  return detail::cpow(CertifiedReal(Rational(2 * n.radius)), s);
}

/**
 * \brief Lower bound on the full-family mass: card sigma(x) lower bound times the
 * least (diam B(z))^s, with diam B(z) >= 2 c2 (1 - 2^-60) |z|^r0 at |z| <= y_hi^(1+b).
 */
inline std::optional<CertifiedReal> family_mass_lower(const TreeNode& n, const TreeParams& P, const Rational& s) {
  if (!P.resolved()) return std::nullopt;
  CardEnclosure card = card_sigma(n, P);
  if (compare(card.lo, CertifiedReal(0)) <= 0) return std::nullopt;
  FamilyData F = family_data(n, P);
  CertifiedReal zmax = detail::cpow(CertifiedReal(F.y_hi), P.one_plus_b());
  CertifiedReal dmin = CertifiedReal(Rational(2 * *P.c2 * (1 - 1 / rpow(Rational(2), 60)))) *
                       detail::cpow(zmax, P.exps.r0);
  return card.lo * detail::cpow(dmin, s);
}

/**
 * \brief Cylinder measure with child weight = parent weight * m_c / sum m_c and
 * m_c = (diam B(c))^s rounded down to a dyadic rational, so additivity is exact.
 */
inline CylinderMeasure mass_measure(const Tree& t, const Rational& s, bool with_family_bound = true) {
  if (t.nodes.size() < 2) throw DepthInsufficient("mass measure needs at least one generation");
  if (s <= 0) throw DomainError("s must be positive");
  std::size_t n = t.nodes.size();
  CylinderMeasure mm;
  mm.s = s;
  mm.weight.assign(n, Rational(0));
  mm.M.assign(n, std::nullopt);
  mm.rounded_mass.assign(n, Rational(0));
  mm.truncated.assign(n, false);
  mm.mass_ok.assign(n, std::nullopt);
  mm.family_mass_ok.assign(n, std::nullopt);
  mm.weight[0] = 1;
  for (std::size_t id = 0; id < n; ++id) {
    const TreeNode& x = t.nodes[id];
    if (x.children.empty()) continue;
    mm.truncated[id] = x.truncated;
    if (x.truncated) mm.renormalized = true;
    std::vector<Rational> rho;
    CertifiedReal total(0);
    Rational sum = 0;
    for (std::size_t c : x.children) {
      CertifiedReal d = diam_power(t.nodes[c], s);
      total += d;
      rho.push_back(round_down_dyadic(d));
      sum += rho.back();
    }
    mm.M[id] = total;
    mm.rounded_mass[id] = sum;
    if (sum <= 0) throw InvariantViolation("child masses vanish");
    Rational acc = 0;
    for (std::size_t i = 0; i < x.children.size(); ++i) {
      Rational w = mm.weight[id] * rho[i] / sum;
      mm.weight[x.children[i]] = w;
      acc += w;
    }
    mm.additivity_ok = mm.additivity_ok && acc == mm.weight[id];
    CertifiedReal own = diam_power(x, s);
    try {
      mm.mass_ok[id] = compare(total, own) >= 0;
    } catch (const TieBreak&) {
      mm.mass_ok[id] = false;
    }
    if (!*mm.mass_ok[id]) mm.cylinder_flag = true;
    if (with_family_bound && !x.bootstrap) {
      std::optional<CertifiedReal> fam = family_mass_lower(x, t.params, s);
      if (fam) mm.family_mass_ok[id] = compare(*fam, own) >= 0;
    }
  }
  return mm;
}

/** \brief weight(id) <= (diam B(id) / diam B(root))^s, certified. */
inline bool cylinder_bound_holds(const Tree& t, const CylinderMeasure& mm, std::size_t id) {
  CertifiedReal rhs = diam_power(t.nodes.at(id), mm.s) / diam_power(t.root(), mm.s);
  return compare(CertifiedReal(mm.weight.at(id)), rhs) <= 0;
}

}  // namespace singvec
