#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "singvec/best_approx.hpp"

using namespace singvec;

namespace {

std::vector<Integer> denominators(const BestApproxSequence& s) {
  std::vector<Integer> out;
  for (const auto& r : s.records) out.push_back(r.x.q());
  return out;
}

TargetPoint exact_target(Rational a, Rational b) { return TargetPoint::exact({a, b}); }

/** Rational enclosure of a quadratic irrational (u + sqrt(d)) / w with radius 10^-digits. */
TargetPoint quadratic_enclosure(long u1, long d1, long w1, long u2, long d2, long w2, unsigned digits) {
  Integer scale = ipow(Integer(10), digits);
  auto approx = [&](long u, long d, long w) {
    if (d == 0) return Rational(u, w);
    Integer s = isqrt(Integer(d) * scale * scale);
    return make_rational(Integer(u) * scale + s, Integer(w) * scale);
  };
  return TargetPoint::enclosure({approx(u1, d1, w1), approx(u2, d2, w2)}, make_rational(2, scale));
}

}  // namespace

TEST(BestSequence, HalfHalfTerminates) {
  auto s = best_sequence(exact_target(Rational(1, 2), Rational(1, 2)), 10);
  EXPECT_EQ(denominators(s), (std::vector<Integer>{1, 2}));
  EXPECT_TRUE(s.terminal);
  EXPECT_EQ(s.records.back().rn_sq, 0);
}

TEST(BestSequence, FiveEighths) {
  auto s = best_sequence(exact_target(Rational(5, 8), 0), 10);
  EXPECT_EQ(denominators(s), (std::vector<Integer>{1, 2, 3, 8}));
  std::vector<Rational> r;
  for (const auto& rec : s.records) r.push_back(rec.rn_sq);
  EXPECT_EQ(r, (std::vector<Rational>{Rational(9, 64), Rational(1, 16), Rational(1, 64), 0}));
}

TEST(BestSequence, ThreeSevenths) {
  auto s = best_sequence(exact_target(Rational(3, 7), Rational(2, 7)), 10);
  auto o = oracle::naive_scan(Rational(3, 7), Rational(2, 7), 10);
  ASSERT_EQ(s.records.size(), o.size());
  for (std::size_t i = 0; i < o.size(); ++i) {
    EXPECT_EQ(s.records[i].x.vec(), (IntVec3{o[i].p1, o[i].p2, o[i].q}));
    EXPECT_EQ(s.records[i].rn_sq, o[i].d_sq);
  }
}

TEST(BestSequence, OracleEquivalenceRandomRationals) {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 100; ++it) {
    long d1 = 1 + static_cast<long>(rng() % 1000), d2 = 1 + static_cast<long>(rng() % 1000);
    Rational t1(static_cast<long>(rng() % (2 * d1)) - d1, d1), t2(static_cast<long>(rng() % (2 * d2)) - d2, d2);
    t1.canonicalize();
    t2.canonicalize();
    auto s = best_sequence(exact_target(t1, t2), 10000);
    auto o = oracle::naive_scan(t1, t2, 10000);
    ASSERT_EQ(s.records.size(), o.size()) << t1 << " " << t2;
    for (std::size_t i = 0; i < o.size(); ++i) {
      EXPECT_EQ(s.records[i].x.q(), o[i].q);
      EXPECT_EQ(s.records[i].rn_sq, o[i].d_sq);
      PrimitiveVector px = make_primitive(o[i].p1, o[i].p2, o[i].q);
      EXPECT_EQ(s.records[i].x, px);
    }
    EXPECT_EQ(s.terminal, o.back().d_sq == 0);
  }
}

TEST(BestSequence, MonotoneRecords) {
  auto s = best_sequence(quadratic_enclosure(-1, 2, 1, -1, 3, 1, 40), 100000);
  for (std::size_t i = 1; i < s.records.size(); ++i) {
    EXPECT_LT(s.records[i - 1].x.q(), s.records[i].x.q());
    EXPECT_LT(s.records[i].rn_sq, s.records[i - 1].rn_sq);
  }
}

TEST(BestSequence, OneDimensionalEmbeddingMatchesContinuedFraction) {
  struct Case {
    long u, d, w;
  };
  for (Case cs : {Case{-1, 2, 1}, Case{-1, 5, 2}, Case{-2, 7, 1}, Case{1, 13, 6}}) {
    TargetPoint t = quadratic_enclosure(cs.u, cs.d, cs.w, 0, 0, 1, 40);
    t.center.b = 0;
    Integer qmax("1000000000000");
    auto s = best_sequence(t, qmax);
    EXPECT_EQ(denominators(s), oracle::convergent_denominators(t.center.a, qmax)) << cs.d;
  }
}

TEST(BestSequence, CoarseEnclosureRejected) {
  TargetPoint t = TargetPoint::enclosure({Rational(1, 3), Rational(1, 5)}, Rational(1, 1000));
  EXPECT_THROW(best_sequence(t, 10000), EnclosureTooCoarse);
}

TEST(Legendre, Examples) {
  PrimitiveVector x = make_primitive(1, 0, 2);
  EXPECT_EQ(legendre_classify(x, exact_target(Rational(1, 2), 0)), LegendreClass::inner);
  EXPECT_EQ(legendre_classify(x, exact_target(Rational(3, 2), 0)), LegendreClass::outer);
  EXPECT_EQ(legendre_classify(x, exact_target(Rational(5, 8), 0)), LegendreClass::inner);
  EXPECT_EQ(legendre_classify(x, exact_target(Rational(5, 8) + Rational(1, 1000), 0)), LegendreClass::between);
}

TEST(Legendre, InnerImpliesRecordAboveThreshold) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int it = 0; it < 300; ++it) {
    long q = 5 + static_cast<long>(rng() % 60);
    PrimitiveVector x = make_primitive(static_cast<long>(rng() % q), static_cast<long>(rng() % q), q);
    if (x.q() <= 4) continue;
    FareyLattice L = farey_lattice(x);
    Rational r_sq = L.lam1_sq / (4 * x.q() * x.q());
    Rational f1(static_cast<long>(rng() % 2001) - 1000, 1000), f2(static_cast<long>(rng() % 2001) - 1000, 1000);
    Rational scale = f1 * f1 + f2 * f2;
    if (scale > 1) continue;
    Rational step = floor_sqrt(r_sq * 1000000) / Rational(1000);
    Vec2 th = {x.point().a + f1 * step, x.point().b + f2 * step + Rational(1, 1000003) * step};
    TargetPoint t = exact_target(th.a, th.b);
    if (legendre_classify(x, L, t) != LegendreClass::inner) continue;
    auto s = best_sequence(t, x.q());
    bool found = false;
    for (const auto& r : s.records) found = found || r.x == x;
    EXPECT_TRUE(found) << x;
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Bai3, RandomRationalsClean) {
  std::mt19937_64 rng(31337);
  for (int it = 0; it < 100; ++it) {
    long d1 = 1 + static_cast<long>(rng() % 1000), d2 = 1 + static_cast<long>(rng() % 1000);
    Rational t1(static_cast<long>(rng() % d1), d1), t2(static_cast<long>(rng() % d2), d2);
    t1.canonicalize();
    t2.canonicalize();
    auto s = best_sequence(exact_target(t1, t2), 100);
    Bai3Report rep = verify_bai3(s);
    EXPECT_TRUE(rep.clean()) << t1 << " " << t2 << " first: " << (rep.violations.empty() ? "" : rep.violations[0].check);
  }
}

TEST(Bai3, SingleRecordVacuous) {
  auto s = best_sequence(exact_target(0, 0), 10);
  ASSERT_EQ(s.records.size(), 1u);
  EXPECT_TRUE(verify_bai3(s).clean());
  EXPECT_EQ(verify_bai3(s).checked, 0u);
}

TEST(Bai3, ComparabilityFiveEighths) {
  auto s = best_sequence(exact_target(Rational(5, 8), 0), 10);
  Bai3Report rep = verify_bai3(s);
  EXPECT_TRUE(rep.clean());
  // (p, q) = x_1 = (1, 0, 2) against x_3 = 5/8: |p - q theta| = 1/4 = |p - q x_3|.
  Rational A = Rational(1) - 2 * Rational(5, 8);
  Rational B = Rational(1) - 2 * s.records[3].x.point().a;
  EXPECT_EQ(A * A, B * B);
}

TEST(ExponentProfile, FiveEighths) {
  auto s = best_sequence(exact_target(Rational(5, 8), 0), 10);
  auto rows = exponent_profile(s, {1, 4, 8, 10});
  EXPECT_EQ(rows[1].best_dist_sq, Rational(1, 64));
  EXPECT_FALSE(rows[0].estimate.has_value());
  EXPECT_TRUE(rows[2].infinite);
  EXPECT_TRUE(rows[3].infinite);
}

TEST(ExponentProfile, BadlyApproximableNearHalf) {
  auto s = best_sequence(quadratic_enclosure(-1, 2, 1, -1, 3, 1, 40), 10000);
  auto rows = exponent_profile(s, {10000});
  ASSERT_TRUE(rows[0].estimate.has_value());
  double e = rows[0].estimate->approx();
  EXPECT_GT(e, 0.4);
  EXPECT_LT(e, 0.6);
}

TEST(SingularWitness, DegenerateRationalPasses) {
  // On the line theta_2 = 0 every Farey lattice has lambda1 = 1/q.
  auto s = best_sequence(exact_target(Rational(5, 8), 0), 10);
  auto rows = singular_witness(s, Rational(3, 5), 1, 10);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_TRUE(r.ok());
}

TEST(SingularWitness, PlanarRationalFailsAtTerminalRecord) {
  auto s = best_sequence(exact_target(Rational(3, 7), Rational(2, 7)), 10);
  ASSERT_TRUE(s.terminal);
  auto rows = singular_witness(s, Rational(3, 5), 1, 10);
  ASSERT_FALSE(rows.empty());
  EXPECT_FALSE(rows.back().lambda1_ok);
}

TEST(SingularWitness, HalfOnIrrationalIsMixed) {
  auto s = best_sequence(quadratic_enclosure(-1, 2, 1, -1, 3, 1, 40), 100000);
  auto rows = singular_witness(s, Rational(1, 2), 1, 1000);
  int pass = 0, fail = 0;
  for (const auto& r : rows) (r.lambda1_ok ? pass : fail)++;
  EXPECT_GT(pass, 0);
  EXPECT_GT(fail, 0);
}
