#pragma once
/**
 * \file dimension_lab.hpp
 * \brief Counting profiler, box-counting and local-dimension estimators,
 * and the truncated upper-covering audit.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "singvec/cantor_tree.hpp"
#include "singvec/mass_measure.hpp"
#include "singvec/tiling.hpp"

namespace singvec {

// ---------------------------------------------------------------------------
// Counting profile

/** \brief One D1 cluster: the points z-hat = y-hat + t u_y on a line through y-hat. */
struct SceneCluster {
  Vec2 center;                ///< y-hat
  Rational lambda1_sq;        ///< lambda1(y)^2 = |u_y|^2
  Vec2 direction;             ///< u_y
  std::vector<Rational> t;    ///< sorted offsets along u_y
  std::vector<Vec2> points;   ///< the z-hat, in the order of t
};

/** \brief Point configuration and scales of one node. */
struct CountingScene {
  std::size_t node = 0;
  CertifiedReal R0, R1, R2, R3, H, V;
  Rational C0;
  std::vector<SceneCluster> clusters;
  std::vector<TilingCell> tiles;
  NodeReport hypotheses;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.points.size();
    return n;
  }
};

/**
 * \brief Scene of a tree node: R0 = r(x), R1 = c1 R1(x), R2 = least same-y separation,
 * R3 = least child radius, H and V from the tiling; E-points are the first
 * `witness_limit` points of E1 starting at alpha_0, each with up to
 * `per_witness_limit` points of D1.
 */
inline CountingScene make_scene(const TreeNode& node, const TreeParams& P, std::size_t witness_limit = 3,
                                std::size_t per_witness_limit = 400) {
  CountingScene S;
  S.node = node.id;
  FamilyData F = family_data(node, P);
  S.R0 = CertifiedReal(node.radius);
  S.R1 = CertifiedReal(*P.c1) * F.R1;
  S.R2 = F.sep_min;
  S.R3 = CertifiedReal(*P.c2) * detail::cpow(detail::cpow(CertifiedReal(F.y_hi), P.one_plus_b()), P.exps.r0);
  CertifiedReal lam1 = node.lattice.lambda1();
  S.H = lam1 / F.Y0;
  S.V = CertifiedReal(1) / (lam1 * F.Y0 * F.Y0);
  S.C0 = P.tiling_c0;

  std::vector<Integer> ms = {Integer(0)};
  for (Integer j = 1; j <= F.M; ++j) {
    ms.push_back(j);
    ms.push_back(-j);
  }
  for (const Integer& m : ms) {
    AlphaWindow w = alpha_window(node.x, node.lattice, P, m);
    for (Integer k = w.k_lo; k <= w.k_hi && S.clusters.size() < witness_limit; ++k) {
      PrimitiveVector y = make_primitive(w.lift(k, node.x));
      D1Window D = d1_window(y, P);
      SceneCluster c;
      c.center = y.point();
      c.lambda1_sq = D.lattice.lam1_sq;
      c.direction = D.sub.generator;
      std::vector<std::pair<Rational, Vec2>> pts;
      for (Integer mag = 1; mag <= D.a_max && pts.size() < per_witness_limit; ++mag) {
        for (int sign : {1, -1}) {
          Integer a = sign * mag;
          HeightWindow kr = D.k_range(a);
          for (Integer kk = kr.lo; kk <= kr.hi && pts.size() < per_witness_limit; ++kk) {
            if (gcd(a, kk) != 1) continue;
            PrimitiveVector z = make_primitive(D.point(a, kk));
            pts.push_back({Rational(a) / Rational(z.q()), z.point()});
          }
        }
      }
      std::sort(pts.begin(), pts.end(), [](const auto& s, const auto& t) { return s.first < t.first; });
      for (auto& [t, p] : pts) {
        c.t.push_back(t);
        c.points.push_back(p);
      }
      S.clusters.push_back(std::move(c));
      if (k == w.k_lo) S.tiles.push_back(detail::make_cell(node, m, floor_div(y.q(), node.x.q())));
    }
    if (S.clusters.size() >= witness_limit) break;
  }

  CertifiedReal C0(S.C0);
  S.hypotheses.node = node.id;
  S.hypotheses.certify("R0_over_C0_ge_H", [&] { return detail::le(S.H, S.R0 / C0); });
  S.hypotheses.certify("V_ge_R1_over_C0", [&] { return detail::le(S.R1 / C0, S.V); });
  S.hypotheses.certify("cluster_size_bound", [&] {
    Integer kmax = floor(CertifiedReal(2) * S.R1 / S.R2);
    return std::all_of(S.clusters.begin(), S.clusters.end(), [&](const SceneCluster& c) {
      return Integer(static_cast<unsigned long>(c.points.size())) <= kmax;
    });
  });
  return S;
}

/** \brief One row of the counting profile. */
struct ProfileRow {
  Rational r;
  std::size_t count = 0;       ///< max card(S cap B(a, r)) found
  bool within_cluster = false; ///< the maximum came from one cluster, where it is exact
  CertifiedReal f;             ///< count / r^s
  CertifiedReal bound;         ///< 72 C0^4 max{...}
  bool ok = false;
};

/** \brief Result of counting_profile. */
struct ProfileReport {
  Rational s;
  std::vector<ProfileRow> rows;
  NodeReport hypotheses;
  bool ok() const {
    return hypotheses.ok() && std::all_of(rows.begin(), rows.end(), [](const ProfileRow& r) { return r.ok; });
  }
};

/** \brief The counting bound: s >= 1 uses two terms, s < 1 adds R1/(R2 R1^s). */
inline CertifiedReal counting_bound(const CountingScene& S, const Rational& s) {
  CertifiedReal C0(S.C0);
  CertifiedReal k = CertifiedReal(72) * C0 * C0 * C0 * C0;
  CertifiedReal t1 = CertifiedReal(1) / detail::cpow(S.R3, s);
  CertifiedReal t3 = S.R1 * S.R0 * S.R0 / (S.V * S.H * S.R2) / detail::cpow(S.R0, s);
  CertifiedReal m = max(t1, t3);
  if (s < 1) m = max(m, S.R1 / (S.R2 * detail::cpow(S.R1, s)));
  return k * m;
}

namespace detail {

/** \brief Max number of collinear cluster points in a window of length 2r, exact. */
inline std::size_t cluster_max(const SceneCluster& c, const Rational& r) {
  std::size_t best = 0, j = 0;
  Rational lim = 4 * r * r / c.lambda1_sq;
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    if (j < i) j = i;
    while (j + 1 < c.t.size()) {
      Rational d = c.t[j + 1] - c.t[i];
      if (d * d <= lim) ++j;
      else break;
    }
    best = std::max(best, j - i + 1);
  }
  return best;
}

}  // namespace detail

/**
 * \brief Empirical f(r) = max_a card(S cap B(a, r)) / r^s on a grid of radii.
 *
 * Within one cluster the maximum is exact (collinear points); across clusters the
 * centers are restricted to S-points and midpoints of cluster centers.
 */
inline ProfileReport counting_profile(const CountingScene& S, const Rational& s, const std::vector<Rational>& r_grid) {
  ProfileReport rep;
  rep.s = s;
  rep.hypotheses = S.hypotheses;
  CertifiedReal bound = counting_bound(S, s);
  std::vector<Vec2> centers;
  for (const auto& c : S.clusters) centers.insert(centers.end(), c.points.begin(), c.points.end());
  for (std::size_t i = 0; i < S.clusters.size(); ++i) {
    centers.push_back(S.clusters[i].center);
    for (std::size_t j = i + 1; j < S.clusters.size(); ++j) {
      centers.push_back(Rational(1, 2) * (S.clusters[i].center + S.clusters[j].center));
    }
  }
  std::vector<Rational> reach_sq;
  for (const auto& c : S.clusters) {
    Rational m = 0;
    for (const auto& p : c.points) m = std::max(m, dist_sq(p, c.center));
    reach_sq.push_back(m);
  }
  for (const Rational& r : r_grid) {
    ProfileRow row;
    row.r = r;
    for (const auto& c : S.clusters) {
      std::size_t n = detail::cluster_max(c, r);
      if (n > row.count) {
        row.count = n;
        row.within_cluster = true;
      }
    }
    Rational r_sq = r * r;
    for (const Vec2& a : centers) {
      std::size_t n = 0;
      for (std::size_t ci = 0; ci < S.clusters.size(); ++ci) {
        const auto& c = S.clusters[ci];
        Rational dc = dist_sq(a, c.center);
        Rational reach = r_sq + reach_sq[ci];
        if (dc > 2 * reach) continue;  // |a - c| > r + reach since (r + R)^2 <= 2(r^2 + R^2)
        for (const auto& p : c.points) {
          if (dist_sq(a, p) <= r_sq) ++n;
        }
      }
      if (n > row.count) {
        row.count = n;
        row.within_cluster = false;
      }
    }
    row.f = CertifiedReal(Integer(static_cast<unsigned long>(row.count))) / detail::cpow(CertifiedReal(r), s);
    row.bound = bound;
    try {
      row.ok = detail::le(row.f, bound);
    } catch (const TieBreak&) {
      row.ok = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

/** \brief n dyadic radii from R3 to R0, geometric in between (rounded down). */
inline std::vector<Rational> radius_grid(const CountingScene& S, std::size_t n) {
  std::vector<Rational> out;
  CertifiedReal lr3 = log(S.R3), lr0 = log(S.R0);
  for (std::size_t i = 0; i < n; ++i) {
    Rational t = n == 1 ? Rational(0) : Rational(static_cast<long>(i), static_cast<long>(n - 1));
    t.canonicalize();
    out.push_back(round_down_dyadic(exp(lr3 + CertifiedReal(t) * (lr0 - lr3))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Box counting

/** \brief Least-squares slope of log N(delta) against log(1/delta). */
struct BoxCountResult {
  std::vector<std::pair<long, std::size_t>> counts;  ///< (k, N(2^-k))
  double slope = 0;
  double intercept = 0;
  double std_error = 0;
  double band_lo() const { return slope - 2 * std_error; }
  double band_hi() const { return slope + 2 * std_error; }
};

/** \brief Box counts on the dyadic grid anchored at 0 at scales 2^-k; exact membership. */
inline BoxCountResult boxcount(const std::vector<Vec2>& points, const std::vector<long>& ks) {
  std::set<long> distinct(ks.begin(), ks.end());
  if (distinct.size() < 2) throw DegenerateScales("box counting needs two distinct scales");
  if (points.empty()) throw DegenerateScales("box counting needs at least one point");
  BoxCountResult res;
  std::vector<double> xs, ys;
  for (long k : distinct) {
    Rational scale = k >= 0 ? rpow(Rational(2), static_cast<unsigned long>(k))
                            : Rational(1) / rpow(Rational(2), static_cast<unsigned long>(-k));
    std::set<std::pair<Integer, Integer>> boxes;
    for (const Vec2& p : points) boxes.insert({floor(Rational(p.a * scale)), floor(Rational(p.b * scale))});
    res.counts.push_back({k, boxes.size()});
    xs.push_back(static_cast<double>(k) * std::log(2.0));
    ys.push_back(std::log(static_cast<double>(boxes.size())));
  }
  std::size_t n = xs.size();
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  res.slope = sxy / sxx;
  res.intercept = my - res.slope * mx;
  if (n > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = ys[i] - res.intercept - res.slope * xs[i];
      ssr += e * e;
    }
    res.std_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return res;
}

/** \brief Centers of the extracted enclosures of all leaves. */
inline std::vector<Vec2> leaf_points(const Tree& t) {
  std::vector<Vec2> out;
  for (std::size_t id : t.leaves()) out.push_back(extract_point(t, t.path_to(id)).center);
  return out;
}

// ---------------------------------------------------------------------------
// Local dimension

/** \brief log weight / log diam at one node. */
struct LocalDimRow {
  std::size_t node = 0;
  CertifiedReal ratio;
  bool exact = false;
};

/** \brief Ratios and summary statistics. */
struct LocalDimReport {
  Rational s;
  std::vector<LocalDimRow> rows;
  double min = 0, q10 = 0, median = 0, q90 = 0, max = 0;
  double fraction_at_least_s_minus_02 = 0;
  /** \brief At least 90% of the ratios are certified below s. */
  bool systematically_below = false;
};

namespace detail {

/** \brief log2 of a rational power of two, if it is one. */
inline std::optional<long> log2_exact(const Rational& v) {
  if (v <= 0) return std::nullopt;
  const Integer& n = v.get_num();
  const Integer& d = v.get_den();
  auto pw = [](const Integer& u) -> std::optional<long> {
    if (mpz_popcount(u.get_mpz_t()) != 1) return std::nullopt;
    return static_cast<long>(mpz_scan1(u.get_mpz_t(), 0));
  };
  auto a = pw(n), b = pw(d);
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

inline double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  double idx = p * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  std::size_t hi = std::min(v.size() - 1, lo + 1);
  return v[lo] + (v[hi] - v[lo]) * (idx - static_cast<double>(lo));
}

}  // namespace detail

/**
 * \brief log(weight) / log(diam B) at the sampled nodes (default: all leaves).
 * Exact when the weight and the diameter are powers of two.
 */
inline LocalDimReport local_dimension(const CylinderMeasure& mm, const Tree& t,
                                      std::vector<std::size_t> sample = {}) {
  if (t.depth() < 1) throw DepthInsufficient("local dimension needs depth >= 1");
  if (sample.empty()) sample = t.leaves();
  LocalDimReport rep;
  rep.s = mm.s;
  std::vector<double> vals;
  std::size_t at_least = 0, below = 0;
  for (std::size_t id : sample) {
    const TreeNode& n = t.nodes.at(id);
    if (n.depth == 0) continue;
    Rational w = mm.weight.at(id);
    Rational diam = 2 * n.radius;
    LocalDimRow row;
    row.node = id;
    auto lw = detail::log2_exact(w), ld = detail::log2_exact(diam);
    if (lw && ld && *ld != 0) {
      Rational r(*lw, *ld);
      r.canonicalize();
      row.ratio = r;
      row.exact = true;
    } else {
      row.ratio = log(CertifiedReal(w)) / log(CertifiedReal(diam));
    }
    double v = row.ratio.approx();
    vals.push_back(v);
    if (v >= mm.s.get_d() - 0.2) ++at_least;
    try {
      if (compare(row.ratio, CertifiedReal(mm.s)) < 0) ++below;
    } catch (const TieBreak&) {
    }
    rep.rows.push_back(row);
  }
  if (vals.empty()) throw DepthInsufficient("no sampled node below the root");
  rep.min = *std::min_element(vals.begin(), vals.end());
  rep.max = *std::max_element(vals.begin(), vals.end());
  rep.q10 = detail::quantile(vals, 0.1);
  rep.median = detail::quantile(vals, 0.5);
  rep.q90 = detail::quantile(vals, 0.9);
  rep.fraction_at_least_s_minus_02 = static_cast<double>(at_least) / static_cast<double>(vals.size());
  rep.systematically_below = 10 * below >= 9 * vals.size();
  return rep;
}

// ---------------------------------------------------------------------------
// Upper covering audit

namespace detail {

using i128 = __int128;

/** \brief Gauss-reduced Farey lattice of a small primitive vector, scaled by q. */
struct SmallFarey {
  std::int64_t b1[2], b2[2];
  std::int64_t pre1[3];  ///< preimage of b1: q pi(pre1) = b1
  i128 n1 = 0, n2 = 0;   ///< squared norms
};

inline std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return a >= 0 ? a : -a;
  }
  std::int64_t x1, y1;
  std::int64_t g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

inline std::int64_t fdiv(std::int64_t a, std::int64_t b) {
  std::int64_t d = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --d;
  return d;
}

/** \brief Nearest integer to n/d, ties up. */
inline std::int64_t round_ratio(i128 n, i128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 t = 2 * n + d;
  i128 q = t / (2 * d);
  if (t % (2 * d) != 0 && t < 0) --q;
  return static_cast<std::int64_t>(q);
}

inline SmallFarey small_farey(std::int64_t p1, std::int64_t p2, std::int64_t q) {
  // Vectors q pi(c) = (q c1 - c3 p1, q c2 - c3 p2).
  std::int64_t kk, nn;
  std::int64_t g = ext_gcd(p2, q, kk, nn);  // kk p2 + nn q = g
  if (g == 0) g = q;
  // v1: c3 = -kk, c2 = nn, c1 chosen to reduce the first coordinate
  std::int64_t first = kk * p1;  // q c1 + kk p1
  std::int64_t c1 = -fdiv(first, q);
  std::int64_t v1[2] = {q * c1 + first, g};
  std::int64_t pv1[3] = {c1, nn, -kk};
  // v2 = (q/g, 0): c3 = -(q/g) t, c2 = -t p2 / g, c1 = m with g m + t p1 = 1
  std::int64_t m, t;
  ext_gcd(g, ((p1 % g) + g) % g, m, t);
  // g m + t (p1 mod g) = 1; fold p1 = (p1 mod g) + g j into m
  std::int64_t j = fdiv(p1, g);
  m -= t * j;
  std::int64_t v2[2] = {q / g, 0};
  std::int64_t pv2[3] = {m, -t * (p2 / g), -(q / g) * t};
  SmallFarey F;
  auto norm = [](const std::int64_t* v) { return i128(v[0]) * v[0] + i128(v[1]) * v[1]; };
  auto dotp = [](const std::int64_t* u, const std::int64_t* v) { return i128(u[0]) * v[0] + i128(u[1]) * v[1]; };
  std::int64_t a[2] = {v1[0], v1[1]}, b[2] = {v2[0], v2[1]};
  std::int64_t pa[3] = {pv1[0], pv1[1], pv1[2]}, pb[3] = {pv2[0], pv2[1], pv2[2]};
  if (norm(b) < norm(a)) {
    std::swap(a, b);
    std::swap(pa, pb);
  }
  for (;;) {
    std::int64_t k = round_ratio(dotp(a, b), norm(a));
    if (k != 0) {
      b[0] -= k * a[0];
      b[1] -= k * a[1];
      for (int i = 0; i < 3; ++i) pb[i] -= k * pa[i];
    }
    if (norm(b) < norm(a)) {
      std::swap(a, b);
      std::swap(pa, pb);
    } else {
      break;
    }
  }
  F.b1[0] = a[0];
  F.b1[1] = a[1];
  F.b2[0] = b[0];
  F.b2[1] = b[1];
  for (int i = 0; i < 3; ++i) F.pre1[i] = pa[i];
  F.n1 = norm(a);
  F.n2 = norm(b);
  return F;
}

}  // namespace detail

/** \brief Covering sum restricted to one height shell (previous cutoff, cutoff]. */
struct AuditShell {
  Integer cutoff;
  std::size_t count_z = 0;
  double shell_ratio = 0;    ///< shell sum of diam^s over diam B(x)^s
  double partial_ratio = 0;  ///< partial sum up to the cutoff over diam B(x)^s
  std::optional<double> log_decrement;  ///< log(shell / previous shell)
};

/** \brief Result of upper_covering_audit. */
struct UpperAuditReport {
  PrimitiveVector x;
  Rational mu, s, gamma;
  std::size_t count_y = 0;
  std::vector<AuditShell> shells;
  CoveringExponents exponents;  ///< a, b, A, B at (mu, gamma, t = s/(1-mu))
  /** \brief b > 2, (b-1)/(1-mu) - a > 2 and B - b > 0, under which the tail decays. */
  bool predicted_decay = false;
  bool monotone = true;           ///< partial sums nondecreasing
  bool shells_decreasing = true;  ///< every shell sum below the previous one
  bool tail_decreasing = false;   ///< the last log-decrement is negative
  bool decay_sign_matches = false;
  bool below_one = true;          ///< every partial ratio < 1
};

/**
 * \brief Partial covering sums of diam B(z)^s over z in sigma_mu(x) with |z| <= cutoff.
 *
 * E(x): y = lift of a primitive alpha = s u1 + t u2 (t != 0) with |y| > |x| and
 * |x| |alpha| <= |y|^(1-mu), which puts y in Q_mu; D(y): z = a y' + k y, gcd(a, k) = 1,
 * |y| <= |z|, |a| |y| <= 4 |z| and lambda1(z) <= |z|^-mu. diam B(z) = 2c (lambda2(z)^((1-gamma)mu) |z|^((mu-1) mu gamma + 1))^(-1/(1-mu)).
 * Points reached from several y are counted with multiplicity; sums are in double.
 */
inline UpperAuditReport upper_covering_audit(const PrimitiveVector& x, const Rational& mu, const Rational& s,
                                             const Rational& gamma, const std::vector<Integer>& cutoffs) {
  require_mu(mu);
  if (cutoffs.empty()) throw DomainError("at least one cutoff is required");
  FareyLattice L = farey_lattice(x);
  const Integer& q = x.q();
  if (compare_power(Rational(q), -2 * mu, L.lam1_sq) < 0) {
    throw HeightTooSmall("lambda1(x) <= |x|^-mu fails at the audit root");
  }
  std::vector<Integer> cuts = cutoffs;
  std::sort(cuts.begin(), cuts.end());
  Integer C = cuts.back();
  if (C > Integer(1) << 40) throw DomainError("audit cutoff too large for the small-integer path");
  UpperAuditReport rep;
  rep.x = x;
  rep.mu = mu;
  rep.s = s;
  rep.gamma = gamma;
  rep.exponents = covering_exponents(mu, gamma, Rational(s / (1 - mu)));
  {
    const CoveringExponents& E = rep.exponents;
    rep.predicted_decay = E.b > 2 && (E.b - 1) / (1 - mu) - E.a > 2 && E.B - E.b > 0;
  }

  double dmu = mu.get_d(), dg = gamma.get_d(), ds = s.get_d();
  double inv = 1.0 / (1.0 - dmu);
  auto log_diam = [&](double log_lam2, double log_h) {
    return -inv * ((1.0 - dg) * dmu * log_lam2 + ((dmu - 1.0) * dmu * dg + 1.0) * log_h);
  };
  double lx = log_diam(0.5 * std::log(L.lam2_sq.get_d()), std::log(q.get_d()));

  Rational e = 2 * (1 - mu);
  unsigned long en = e.get_num().get_ui(), ed = e.get_den().get_ui();
  Rational amax_sq = Rational(1, 1);
  {
    // |alpha|^2 <= C^(2(1-mu)) / q^2, bounded via integer roots
    Integer Cn = ipow(C, en);
    Integer root = iroot(Cn, ed) + 1;
    amax_sq = Rational(root) / (Rational(q) * q);
  }
  Integer tmax = isqrt(ceil(Rational(2 * amax_sq / L.lam2_sq))) + 1;
  Integer smax = isqrt(ceil(Rational(2 * amax_sq / L.lam1_sq))) + 1;

  std::vector<double> shell_max(cuts.size(), -INFINITY);
  std::vector<std::vector<double>> shell_terms(cuts.size());
  std::vector<std::size_t> shell_count(cuts.size(), 0);
  auto add_term = [&](std::int64_t z3, double term) {
    std::size_t i = std::lower_bound(cuts.begin(), cuts.end(), Integer(static_cast<long>(z3))) - cuts.begin();
    shell_terms[i].push_back(term);
    shell_max[i] = std::max(shell_max[i], term);
    ++shell_count[i];
  };

  std::int64_t Ci = C.get_si();
  for (Integer t = -tmax; t <= tmax; ++t) {
    if (t == 0) continue;
    for (Integer sc = -smax; sc <= smax; ++sc) {
      if (gcd(sc, t) != 1) continue;
      Vec2 alpha = sc * L.u1 + t * L.u2;
      Rational asq = norm_sq(alpha);
      // y3^(2(1-mu)) >= q^2 |alpha|^2 and y3 <= C
      Rational B = Rational(q) * q * asq;
      Integer ylo = std::max(Integer(q + 1), ceil_root(ceil(rpow(B, ed)), en));
      if (ylo > C) continue;
      IntVec3 base = sc * L.w1 + t * L.w2;
      Integer j = floor_div(base.q, q);
      if (j != 0) base = base - j * x.vec();
      Integer k0 = ceil_div(ylo - base.q, q);
      for (Integer k = k0;; ++k) {
        IntVec3 yv = base + k * x.vec();
        if (yv.q > C) break;
        ++rep.count_y;
        std::int64_t y1 = yv.p1.get_si(), y2 = yv.p2.get_si(), y3 = yv.q.get_si();
        detail::SmallFarey Fy = detail::small_farey(y1, y2, y3);
        std::int64_t l1 = Fy.pre1[0], l2 = Fy.pre1[1], l3 = Fy.pre1[2];
        std::int64_t jj = detail::fdiv(2 * l3 + y3 - 1, 2 * y3);  // last coordinate into (-y3/2, y3/2]
        l1 -= jj * y1;
        l2 -= jj * y2;
        l3 -= jj * y3;
        std::int64_t amax = (4 * Ci) / y3;
        for (std::int64_t a = -amax; a <= amax; ++a) {
          std::int64_t zlo = std::max<std::int64_t>(y3, (std::llabs(a) * y3 + 3) / 4);
          std::int64_t base3 = a * l3;
          std::int64_t klo = -detail::fdiv(-(zlo - base3), y3);
          std::int64_t khi = detail::fdiv(Ci - base3, y3);
          for (std::int64_t kz = klo; kz <= khi; ++kz) {
            if (std::gcd(a, kz) != 1) continue;
            std::int64_t z1 = a * l1 + kz * y1, z2 = a * l2 + kz * y2, z3 = a * l3 + kz * y3;
            detail::SmallFarey Fz = detail::small_farey(z1, z2, z3);
            double lz = std::log(static_cast<double>(z3));
            if (std::log(static_cast<double>(Fz.n1)) > (2.0 - 2.0 * dmu) * lz) continue;  // z in Q_mu
            double lam2 = 0.5 * std::log(static_cast<double>(Fz.n2)) - std::log(static_cast<double>(z3));
            add_term(z3, ds * (log_diam(lam2, lz) - lx));
          }
        }
      }
    }
  }

  double partial = 0;
  double prev_shell = INFINITY;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    double sum = 0;
    for (double v : shell_terms[i]) sum += std::exp(v);
    AuditShell sh;
    sh.cutoff = cuts[i];
    sh.count_z = shell_count[i];
    sh.shell_ratio = sum;
    double next = partial + sum;
    rep.monotone = rep.monotone && next >= partial;
    partial = next;
    sh.partial_ratio = partial;
    rep.below_one = rep.below_one && partial < 1;
    if (i > 0) {
      rep.shells_decreasing = rep.shells_decreasing && sum < prev_shell;
      if (sum > 0 && prev_shell > 0) sh.log_decrement = std::log(sum / prev_shell);
    }
    prev_shell = sum;
    rep.shells.push_back(sh);
  }
  if (!rep.shells.empty() && rep.shells.back().log_decrement) rep.tail_decreasing = *rep.shells.back().log_decrement < 0;
  rep.decay_sign_matches = rep.predicted_decay == rep.tail_decreasing;
  return rep;
}

}  // namespace singvec
