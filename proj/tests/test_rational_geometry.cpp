#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "singvec/rational_geometry.hpp"

using namespace singvec;

TEST(MakePrimitive, Normalization) {
  EXPECT_EQ(make_primitive(2, 0, 4), make_primitive(1, 0, 2));
  EXPECT_EQ(make_primitive(1, 1, 3).vec(), (IntVec3{1, 1, 3}));
  EXPECT_EQ(make_primitive(-1, 0, -2).vec(), (IntVec3{1, 0, 2}));
  EXPECT_THROW(make_primitive(0, 0, 0), ZeroVector);
  EXPECT_THROW(make_primitive(1, 0, 0), DomainError);
}

TEST(FareyLattice, UnitLattice) {
  FareyLattice L = farey_lattice(make_primitive(0, 0, 1));
  EXPECT_EQ(L.lam1_sq, 1);
  EXPECT_EQ(L.lam2_sq, 1);
  EXPECT_EQ(L.u1, (Vec2{1, 0}));
  EXPECT_TRUE(L.tied);
}

TEST(FareyLattice, HalfLattice) {
  FareyLattice L = farey_lattice(make_primitive(1, 0, 2));
  EXPECT_EQ(L.lam1_sq, Rational(1, 4));
  EXPECT_EQ(L.lam2_sq, 1);
  EXPECT_EQ(L.u1, (Vec2{Rational(1, 2), 0}));
}

TEST(FareyLattice, ThirdsLattice) {
  FareyLattice L = farey_lattice(make_primitive(1, 1, 3));
  EXPECT_EQ(L.lam1_sq, Rational(2, 9));
  EXPECT_EQ(L.lam2_sq, Rational(5, 9));
  EXPECT_EQ(L.u1, (Vec2{Rational(1, 3), Rational(1, 3)}));
  EXPECT_EQ(L.covolume(), Rational(1, 3));
}

TEST(FareyLattice, InvariantsAgainstBruteForce) {
  std::mt19937_64 rng(12345);
  for (int it = 0; it < 400; ++it) {
    long q = 1 + static_cast<long>(rng() % 200);
    long p1 = static_cast<long>(rng() % 400) - 200;
    long p2 = static_cast<long>(rng() % 400) - 200;
    PrimitiveVector x = make_primitive(p1, p2, q);
    FareyLattice L = farey_lattice(x);
    const Integer& qq = x.q();
    EXPECT_LE(L.lam1_sq, L.lam2_sq);
    EXPECT_LE(2 * abs(dot(L.u1, L.u2)), L.lam1_sq);
    EXPECT_EQ(det(L.u1, L.u2), Rational(1, 1) / qq);
    Rational prod = L.lam1_sq * L.lam2_sq * qq * qq;
    EXPECT_GE(prod, 1);
    EXPECT_LE(prod, Rational(4, 3));
    EXPECT_EQ(project_along(x, L.w1), L.u1);
    EXPECT_EQ(project_along(x, L.w2), L.u2);
    EXPECT_GE(L.w1.q, 0);
    EXPECT_LT(L.w1.q, qq);
    auto [m1, m2] = oracle::brute_force_minima(x);
    EXPECT_EQ(L.lam1_sq, m1);
    EXPECT_EQ(L.lam2_sq, m2);
  }
}

TEST(Wedge, Examples) {
  EXPECT_EQ(wedge_sq(make_primitive(1, 0, 2), make_primitive(1, 1, 3)), 5);
  EXPECT_EQ(wedge_sq(make_primitive(0, 0, 1), make_primitive(1, 0, 2)), 1);
}

TEST(Wedge, DistanceIdentity) {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    PrimitiveVector x = make_primitive(static_cast<long>(rng() % 50), static_cast<long>(rng() % 50), 1 + static_cast<long>(rng() % 50));
    PrimitiveVector y = make_primitive(static_cast<long>(rng() % 50), static_cast<long>(rng() % 50), 1 + static_cast<long>(rng() % 50));
    Rational rhs = Rational(x.q() * x.q() * y.q() * y.q()) * dist_sq(x.point(), y.point());
    EXPECT_EQ(Rational(wedge_sq(x, y)), rhs);
  }
}

TEST(SublatticeH, Examples) {
  HSublattice h = sublattice_H(make_primitive(1, 0, 2));
  EXPECT_EQ(h.generator, (Vec2{Rational(1, 2), 0}));
  EXPECT_EQ(h.lift, (IntVec3{1, 0, 1}));
  HSublattice h3 = sublattice_H(make_primitive(1, 1, 3));
  EXPECT_EQ(h3.generator, (Vec2{Rational(1, 3), Rational(1, 3)}));
  EXPECT_EQ(h3.lift, (IntVec3{0, 0, -1}));
  HSublattice h0 = sublattice_H(make_primitive(0, 0, 1));
  EXPECT_EQ(h0.generator, (Vec2{1, 0}));
  EXPECT_EQ(h0.lift, (IntVec3{1, 0, 0}));
}

TEST(SublatticeH, SpansIntegerPointsOfPlane) {
  PrimitiveVector x = make_primitive(3, 5, 17);
  FareyLattice L = farey_lattice(x);
  HSublattice h = sublattice_H(x, L);
  EXPECT_EQ(abs(det3(x.vec(), h.lift, {0, 0, 1})) + 0, abs(det3(x.vec(), h.lift, {0, 0, 1})));
  for (long a = -3; a <= 3; ++a) {
    for (long k = 1; k <= 4; ++k) {
      IntVec3 z = Integer(a) * h.lift + Integer(k) * x.vec();
      if (z.q <= 0) continue;
      EXPECT_TRUE(member_H(x, L, make_primitive(z)));
    }
  }
  EXPECT_FALSE(member_H(x, L, make_primitive(L.w2 + x.vec())));
}

TEST(LambdaAlpha, Examples) {
  PrimitiveVector x = make_primitive(1, 0, 2);
  FareyLattice L = farey_lattice(x);
  EXPECT_EQ(lambda1_alpha_sq(x, L, {Rational(1, 2), 0}), 1);
  EXPECT_THROW(lambda1_alpha_sq(x, L, {1, 0}), NotPrimitive);
  EXPECT_THROW(lambda1_alpha_sq(x, L, {Rational(1, 3), 0}), NotPrimitive);
}

TEST(LambdaAlpha, MatchesFareyLatticeOfLift) {
  PrimitiveVector x = make_primitive(2, 3, 7);
  FareyLattice L = farey_lattice(x);
  for (long m = -3; m <= 3; ++m) {
    Vec2 alpha = Integer(m) * L.u1 + L.u2;
    IntVec3 w = Integer(m) * L.w1 + L.w2;
    for (long k = 60; k < 64; ++k) {
      IntVec3 yv = w + Integer(k) * x.vec();
      PrimitiveVector y = make_primitive(yv);
      ASSERT_EQ(y.vec(), yv);
      FareyLattice Ly = farey_lattice(y);
      if (Ly.lam1_sq * y.q() * y.q() >= 1) continue;
      EXPECT_EQ(Rational(wedge_sq(x, y)) / (y.q() * y.q()), norm_sq(alpha) * x.q() * x.q() / (y.q() * y.q()));
    }
  }
}
