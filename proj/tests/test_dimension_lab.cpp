#include <gtest/gtest.h>

#include "singvec/dimension_lab.hpp"

using namespace singvec;

namespace {

const Tree& shared_tree() {
  static const Tree t = [] {
    Rational mu(3, 5);
    BuildOptions o;
    o.depth = 2;
    o.cap = 8;
    return build_tree(make_primitive(1, 0, 2), make_tree_params(mu, resolve_b_auto(mu)), o);
  }();
  return t;
}

Tree toy_tree(std::size_t depth) {
  Tree t;
  TreeNode root;
  root.radius = Rational(1, 2);
  root.packing_radius = 1;
  root.bootstrap = true;
  t.nodes.push_back(root);
  std::vector<std::size_t> frontier = {0};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<std::size_t> next;
    for (std::size_t p : frontier) {
      for (int i = 0; i < 2; ++i) {
        TreeNode c;
        c.id = t.nodes.size();
        c.parent = p;
        c.depth = d + 1;
        c.radius = t.nodes[p].radius / 4;
        c.packing_radius = 2 * c.radius;
        t.nodes[p].children.push_back(c.id);
        next.push_back(c.id);
        t.nodes.push_back(c);
      }
    }
    frontier = next;
  }
  return t;
}

Rational dyadic(long j, long k) {
  Rational r(j, 1);
  r /= rpow(Rational(2), static_cast<unsigned long>(k));
  return r;
}

}  // namespace

TEST(CountingProfile, RootSceneWithinBound) {
  const Tree& t = shared_tree();
  CountingScene S = make_scene(t.root(), t.params);
  EXPECT_TRUE(S.hypotheses.ok());
  EXPECT_EQ(S.clusters.size(), 3u);
  auto grid = radius_grid(S, 5);
  for (const Rational& s : {Rational(1, 2), Rational(1), Rational(3, 2)}) {
    ProfileReport rep = counting_profile(S, s, grid);
    EXPECT_TRUE(rep.ok()) << s;
  }
}

TEST(CountingProfile, ExtremeRadii) {
  const Tree& t = shared_tree();
  CountingScene S = make_scene(t.root(), t.params);
  Rational r3 = round_down_dyadic(S.R3);
  Rational r0 = round_down_dyadic(S.R0);
  ProfileReport rep = counting_profile(S, Rational(1), {r3, r0});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_LE(rep.rows[0].count, 2u);
  EXPECT_TRUE(rep.rows[0].ok);
  EXPECT_EQ(rep.rows[1].count, S.size());
  EXPECT_TRUE(rep.rows[1].ok);
}

TEST(CountingProfile, DepthOneScene) {
  const Tree& t = shared_tree();
  CountingScene S = make_scene(t.nodes.at(t.level(1).front()), t.params, 2, 200);
  EXPECT_TRUE(S.hypotheses.ok());
  ProfileReport rep = counting_profile(S, Rational(1), radius_grid(S, 4));
  EXPECT_TRUE(rep.ok());
}

TEST(CountingProfile, SingleEPoint) {
  const Tree& t = shared_tree();
  CountingScene S = make_scene(t.root(), t.params, 1, 50);
  ASSERT_EQ(S.clusters.size(), 1u);
  ProfileReport rep = counting_profile(S, Rational(1), radius_grid(S, 3));
  EXPECT_TRUE(rep.ok());
}

TEST(CountingProfile, ClusterMaxIsExact) {
  SceneCluster c;
  c.center = {0, 0};
  c.lambda1_sq = 1;
  c.direction = {1, 0};
  for (long i : {0, 1, 2, 10, 11}) {
    c.t.push_back(Rational(i));
    c.points.push_back({Rational(i), 0});
  }
  EXPECT_EQ(detail::cluster_max(c, Rational(1, 2)), 2u);
  EXPECT_EQ(detail::cluster_max(c, Rational(1)), 3u);
  EXPECT_EQ(detail::cluster_max(c, Rational(1, 4)), 1u);
  EXPECT_EQ(detail::cluster_max(c, Rational(5)), 4u);
}

TEST(BoxCount, SinglePointSlopeZero) {
  std::vector<Vec2> pts(5, Vec2{Rational(1, 3), Rational(2, 7)});
  BoxCountResult r = boxcount(pts, {1, 2, 3, 4, 5});
  EXPECT_DOUBLE_EQ(r.slope, 0.0);
  for (const auto& [k, n] : r.counts) EXPECT_EQ(n, 1u);
}

TEST(BoxCount, LineSlopeOne) {
  const long K = 8;
  std::vector<Vec2> pts;
  for (long j = 0; j < (1L << K); ++j) pts.push_back({dyadic(j, K), Rational(1, 3)});
  BoxCountResult r = boxcount(pts, {1, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_NEAR(r.slope, 1.0, 1e-12);
  EXPECT_NEAR(r.std_error, 0.0, 1e-12);
}

TEST(BoxCount, GridSlopeTwo) {
  const long K = 6;
  std::vector<Vec2> pts;
  for (long i = 0; i < (1L << K); ++i) {
    for (long j = 0; j < (1L << K); ++j) pts.push_back({dyadic(i, K), dyadic(j, K)});
  }
  BoxCountResult r = boxcount(pts, {1, 2, 3, 4, 5, 6});
  EXPECT_NEAR(r.slope, 2.0, 1e-12);
  EXPECT_EQ(r.counts.back().second, 4096u);
}

TEST(BoxCount, DegenerateScales) {
  std::vector<Vec2> pts = {{0, 0}, {Rational(1, 2), 0}};
  EXPECT_THROW(boxcount(pts, {3}), DegenerateScales);
  EXPECT_THROW(boxcount(pts, {3, 3}), DegenerateScales);
  EXPECT_THROW(boxcount({}, {1, 2}), DegenerateScales);
}

TEST(BoxCount, ExactBoxMembership) {
  // 1/2 lies on a box boundary and belongs to the upper box
  std::vector<Vec2> pts = {{Rational(1, 2), 0}, {Rational(1, 2) - Rational(1, 1000000), 0}};
  BoxCountResult r = boxcount(pts, {1, 2});
  EXPECT_EQ(r.counts[0].second, 2u);
}

TEST(LocalDimension, ToyFixtureExact) {
  Tree t = toy_tree(5);
  CylinderMeasure mm = mass_measure(t, Rational(1, 2), false);
  LocalDimReport rep = local_dimension(mm, t);
  ASSERT_EQ(rep.rows.size(), 32u);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.exact);
    EXPECT_EQ(compare(row.ratio, CertifiedReal(Rational(1, 2))), 0);
  }
  EXPECT_DOUBLE_EQ(rep.median, 0.5);
  EXPECT_DOUBLE_EQ(rep.fraction_at_least_s_minus_02, 1.0);
  EXPECT_FALSE(rep.systematically_below);
}

TEST(LocalDimension, LargeExponentFlagged) {
  Tree t = toy_tree(4);
  CylinderMeasure mm = mass_measure(t, Rational(2), false);
  LocalDimReport rep = local_dimension(mm, t);
  EXPECT_TRUE(rep.systematically_below);
  EXPECT_DOUBLE_EQ(rep.fraction_at_least_s_minus_02, 0.0);
}

TEST(LocalDimension, DepthInsufficient) {
  Tree t = toy_tree(1);
  CylinderMeasure mm = mass_measure(t, Rational(1, 2), false);
  EXPECT_THROW(local_dimension(mm, t, {0}), DepthInsufficient);
  Tree root_only = toy_tree(0);
  EXPECT_THROW(local_dimension(mm, root_only), DepthInsufficient);
}

TEST(LocalDimension, TreeRatiosAreEnclosures) {
  const Tree& t = shared_tree();
  CylinderMeasure mm = mass_measure(t, Rational(1, 2));
  LocalDimReport rep = local_dimension(mm, t);
  EXPECT_EQ(rep.rows.size(), 64u);
  for (const auto& row : rep.rows) {
    EXPECT_GT(row.ratio.approx(), 0.0);
    EXPECT_LT(row.ratio.width(), Rational(1, 1000000));
  }
  EXPECT_LE(rep.min, rep.median);
  EXPECT_LE(rep.median, rep.max);
}

TEST(UpperAudit, AboveBranchPointBelowOne) {
  Rational mu(3, 4);
  Rational s = 2 * (1 - mu) + Rational(1, 10);
  std::vector<Integer> cuts = {12500, 25000, 50000, 100000};
  UpperAuditReport r = upper_covering_audit(make_primitive(1, 0, 10), mu, s, Rational(0), cuts);
  ASSERT_EQ(r.shells.size(), 4u);
  EXPECT_TRUE(r.predicted_decay);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.below_one);
  EXPECT_TRUE(r.tail_decreasing);
  EXPECT_TRUE(r.decay_sign_matches);
  EXPECT_GT(r.shells.front().count_z, 0u);
  for (std::size_t i = 1; i < r.shells.size(); ++i) EXPECT_GE(r.shells[i].partial_ratio, r.shells[i - 1].partial_ratio);
}

TEST(UpperAudit, ExponentsAtCriticalT) {
  Rational mu(3, 5);
  UpperGamma g = upper_gamma(mu);
  CoveringExponents e = covering_exponents(mu, g.gamma, g.t_crit);
  EXPECT_EQ(e.b, 2);
  EXPECT_EQ((e.b - 1) / (1 - mu) - e.a, 2);
  EXPECT_EQ(e.B, e.b);
}

TEST(UpperAudit, BelowBranchPointStructure) {
  Rational mu(3, 5);
  UpperGamma g = upper_gamma(mu);
  Rational s = g.t_crit * (1 - mu) + Rational(1, 20);
  UpperAuditReport r = upper_covering_audit(make_primitive(1, 0, 40), mu, s, g.gamma, {12500, 25000});
  EXPECT_TRUE(r.predicted_decay);
  EXPECT_TRUE(r.monotone);
  EXPECT_GT(r.count_y, 0u);
  EXPECT_GT(r.exponents.b, 2);
}

TEST(UpperAudit, SmallExponentNegativeControl) {
  UpperAuditReport r =
      upper_covering_audit(make_primitive(1, 0, 10), Rational(3, 4), Rational(1, 10), Rational(0), {25000});
  EXPECT_FALSE(r.predicted_decay);
  EXPECT_FALSE(r.below_one);
  EXPECT_GT(r.shells.back().partial_ratio, 1.0);
}

TEST(UpperAudit, RootOutsideQmu) {
  EXPECT_THROW(upper_covering_audit(make_primitive(1, 1, 3), Rational(3, 4), Rational(1, 2), Rational(0), {1000}),
               HeightTooSmall);
}

TEST(UpperAudit, SmallFareyMatchesExact) {
  for (const auto& x : {make_primitive(1, 0, 10), make_primitive(3, 7, 40), make_primitive(12345, 678, 99991)}) {
    FareyLattice L = farey_lattice(x);
    detail::SmallFarey F = detail::small_farey(x.p1().get_si(), x.p2().get_si(), x.q().get_si());
    Rational q2 = Rational(x.q()) * x.q();
    EXPECT_EQ(Rational(Integer(static_cast<long>(F.n1))) / q2, L.lam1_sq) << x;
    EXPECT_EQ(Rational(Integer(static_cast<long>(F.n2))) / q2, L.lam2_sq) << x;
    // the preimage maps to the shortest vector
    IntVec3 pre{F.pre1[0], F.pre1[1], F.pre1[2]};
    Vec2 v = project_along(x, pre);
    EXPECT_EQ(norm_sq(v), L.lam1_sq) << x;
  }
}
