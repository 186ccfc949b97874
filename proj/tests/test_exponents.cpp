#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>

#include "singvec/exponents.hpp"

using namespace singvec;
using Dec = boost::multiprecision::cpp_dec_float_50;

namespace {

Dec dec(const Rational& r) { return Dec(r.get_num().get_str()) / Dec(r.get_den().get_str()); }

// Independent evaluation: s1 as n_x / (r0 - r3) from the exponent definitions.
Dec s1_via_exponents(Dec mu, Dec b) {
  Dec om = 1 - mu, bp = b + 1;
  Dec r0 = -(mu * mu - mu + b + 1) / (om * bp);
  Dec r3 = (mu + b) / om * r0;
  Dec nx = (2 * b * b + 2 * b * mu + b + (2 * mu - 1) * (2 - mu)) / (om * bp);
  return nx / (r0 - r3);
}

// Maximizer of s1 in b by golden-section search on the independent route.
Dec argmax_s1(Dec mu, Dec lo, Dec hi) {
  const Dec g = (boost::multiprecision::sqrt(Dec(5)) - 1) / 2;
  for (int i = 0; i < 300; ++i) {
    Dec a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (s1_via_exponents(mu, a) < s1_via_exponents(mu, b)) lo = a;
    else hi = b;
  }
  return (lo + hi) / 2;
}

Dec packing_direct(Dec mu, Dec b) {
  return (2 * b * b + 2 * b * mu + b + (2 - mu) * (2 * mu - 1)) / ((mu + 1 + 2 * b) * (b + 2 * mu - 1));
}

Dec argmax_packing(Dec mu, Dec lo, Dec hi) {
  const Dec g = (boost::multiprecision::sqrt(Dec(5)) - 1) / 2;
  for (int i = 0; i < 300; ++i) {
    Dec a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (packing_direct(mu, a) < packing_direct(mu, b)) lo = a;
    else hi = b;
  }
  return (lo + hi) / 2;
}

Rational R(long n, long d = 1) { return make_rational(n, d); }

}  // namespace

TEST(UpperBound, Examples) {
  EXPECT_EQ(upper_bound_dim(R(9, 10)).exact_value(), R(1, 5));
  EXPECT_EQ(upper_bound_dim(R(3, 5)).exact_value(), R(18, 19));
  EXPECT_NEAR(dec(R(18, 19)).convert_to<double>(), 0.947368, 1e-6);
  EXPECT_THROW(upper_bound_dim(R(1, 2)), DomainError);
  EXPECT_THROW(upper_bound_dim(R(1)), DomainError);
}

TEST(UpperBound, BranchesAgreeAtBranchPoint) {
  CertifiedReal mu = sqrt(CertifiedReal(R(1, 2)));
  CertifiedReal d = upper_bound_low_branch(mu) - upper_bound_high_branch(mu);
  EXPECT_LT(abs(d.upper(256)), R(1, 1000000000000));
  EXPECT_NEAR(upper_bound_high_branch(mu).approx(), 2 - std::sqrt(2.0), 1e-12);
  EXPECT_THROW(upper_bound_dim(mu), TieBreak);
}

TEST(S1, LargeBLimit) {
  Rational v = s1(R(3, 5), R(1000000));
  EXPECT_LT(abs(v - R(4, 5)), R(1, 10000));
}

TEST(S1, NearB0) {
  Rational b = parse_rational("0.57729");
  Rational v = s1(R(3, 5), b);
  EXPECT_NEAR(v.get_d(), 0.85297, 1e-5);
  EXPECT_NEAR(v.get_d(), s1_via_exponents(Dec("0.6"), dec(b)).convert_to<double>(), 1e-15);
}

TEST(S1, FourThirdsLimitNeedsSmallProduct) {
  // b = beta (2 mu - 1) with beta = 1e6 and mu = 1/2 + 1e-6 gives b = 2, far from the limit.
  Rational mu = R(1, 2) + R(1, 1000000);
  Rational b = 1000000 * (2 * mu - 1);
  EXPECT_EQ(b, 2);
  EXPECT_NEAR(s1(mu, b).get_d(), 1.0909, 1e-4);
  // The limit 4/3 is approached when mu - 1/2 is small compared with 1/beta.
  Rational mu2 = R(1, 2) + R(1, 1000000000000);
  Rational b2 = 1000000 * (2 * mu2 - 1);
  EXPECT_LT(abs(s1(mu2, b2) - R(4, 3)), R(1, 1000));
}

TEST(S12, DifferencePositiveOnGrid) {
  for (int i = 1; i < 50; ++i) {
    Rational mu = R(1, 2) + R(i, 100);
    for (int j = -10; j <= 10; ++j) {
      Rational b = j >= 0 ? Rational(ipow(Integer(2), j)) : R(1, ipow(Integer(2), -j).get_si());
      EXPECT_NO_THROW(s1_s2(mu, b));
    }
    EXPECT_NO_THROW(s1_s2(mu, R(1000)));
  }
}

TEST(S2, MatchesExponentRoute) {
  for (Rational mu : {R(11, 20), R(3, 5), R(4, 5)}) {
    for (Rational b : {R(1, 3), R(1), R(7, 2)}) {
      NodeExponents e = node_exponents(mu, b);
      EXPECT_EQ(s2(mu, b), e.e1 / (e.r0 - e.r1));
      EXPECT_EQ(s1(mu, b), e.n_x / (e.r0 - e.r3));
    }
  }
}

TEST(B0, Examples) {
  CertifiedReal v = b0(R(3, 5));
  EXPECT_NEAR(v.approx(), 0.57729, 2e-5);
  Dec ref = argmax_s1(Dec("0.6"), Dec("0.01"), Dec("10"));
  EXPECT_NEAR(v.approx(), ref.convert_to<double>(), 1e-10);
  EXPECT_THROW(b0(R(71, 100)), DomainError);
}

TEST(B0, GridMaximality) {
  Rational mu = R(51, 100);
  CertifiedReal v = b0(mu);
  EXPECT_GT(v.lower(), 0);
  CertifiedReal best = s1(CertifiedReal(mu), v);
  for (int k = 0; k <= 40; ++k) {
    Rational f = R(1, 4) * Rational(ipow(Integer(16), 1)) * 0 + R(1, 4) + R(k * 15, 160);
    Rational b = round_down_dyadic(v * CertifiedReal(f));
    if (abs(Rational(b - v.lower())) < R(1, 1000000)) continue;
    EXPECT_TRUE(certified_less(CertifiedReal(s1(mu, b)), best)) << f;
  }
}

TEST(B0, RationalApproximation) {
  Rational b = b0_rational(R(3, 5));
  EXPECT_LT(abs(Rational(b - b0(R(3, 5)).lower(256))), R(2, 1000000));
}

TEST(LowerBound, Examples) {
  EXPECT_EQ(lower_bound_dim(R(4, 5)).exact_value(), R(2, 5));
  double v = lower_bound_dim(R(3, 5)).approx();
  EXPECT_NEAR(v, 0.85297, 1e-5);
  EXPECT_GT(v, 0.8);
  double near_half = lower_bound_dim(R(1, 2) + R(1, 100000)).approx();
  EXPECT_NEAR(near_half, 4.0 / 3.0, 1e-2);
}

TEST(LowerBound, BelowUpperOnGrid) {
  for (int i = 1; i < 100; ++i) {
    Rational mu = R(1, 2) + R(i, 200);
    CertifiedReal lo = lower_bound_dim(mu), up = upper_bound_dim(mu);
    if (below_branch_point(mu)) {
      EXPECT_TRUE(certified_less(lo, up)) << mu;
    } else {
      EXPECT_EQ(lo.exact_value(), up.exact_value());
    }
    EXPECT_TRUE(certified_less_equal(CertifiedReal(Rational(2 * (1 - mu))), lo));
  }
}

TEST(S1, ProfileShape) {
  for (int i = 1; i < 50; ++i) {
    Rational mu = R(1, 2) + R(i, 100);
    Rational prev = -1;
    bool increasing = true;
    for (int j = -10; j <= 20; ++j) {
      Rational b = j >= 0 ? Rational(ipow(Integer(2), j)) : R(1, ipow(Integer(2), -j).get_si());
      Rational v = s1(mu, b);
      if (prev >= 0 && v <= prev) increasing = false;
      prev = v;
    }
    if (below_branch_point(mu)) {
      EXPECT_TRUE(certified_less(CertifiedReal(Rational(2 * (1 - mu))), lower_bound_dim(mu)));
    } else {
      EXPECT_TRUE(increasing) << mu;
    }
  }
}

TEST(Packing, Examples) {
  Rational mu = R(11, 20);
  EXPECT_GT(packing_profile(mu, R(1000)), 1);
  PackingBound p8 = packing_bound(R(4, 5));
  EXPECT_FALSE(p8.attained);
  EXPECT_EQ(p8.value.exact_value(), 1);
  double expect[] = {0.875, 0.944, 0.981, 0.994};
  int i = 0;
  for (long b : {1, 3, 10, 30}) {
    Rational v = packing_profile(R(4, 5), R(b));
    EXPECT_LT(v, 1);
    EXPECT_NEAR(v.get_d(), expect[i++], 1e-3);
  }
}

TEST(Packing, InteriorMaximumMatchesGoldenSection) {
  for (Rational mu : {R(11, 20), R(3, 5), R(13, 20)}) {
    PackingBound pb = packing_bound(mu);
    ASSERT_TRUE(pb.attained);
    Dec bstar = argmax_packing(dec(mu), Dec("0.000001"), Dec("1000"));
    EXPECT_NEAR(pb.argmax->approx(), bstar.convert_to<double>(), 1e-9);
    EXPECT_NEAR(pb.value.approx(), packing_direct(dec(mu), bstar).convert_to<double>(), 1e-12);
    EXPECT_GT(pb.value.lower(), 1);
  }
}

TEST(NodeExponents, MuSixTenthsBOne) {
  NodeExponents e = node_exponents(R(3, 5), R(1));
  EXPECT_EQ(e.e_y, 2);
  EXPECT_EQ(e.r0, R(-11, 5));
  EXPECT_EQ(e.n_x, R(28, 5));
  EXPECT_EQ(e.e_z, 4);
}

TEST(NodeExponents, IdentitiesAndOrderingOnGrid) {
  for (int i = 1; i <= 50; ++i) {
    Rational mu = R(1, 2) + R(i, 102);
    for (int j = 1; j <= 50; ++j) {
      Rational b = R(j * j, 25);
      NodeExponents e = node_exponents(mu, b);
      EXPECT_EQ(e.r3 / e.r0, (mu + b) / (1 - mu));
      EXPECT_EQ(e.d1 + e.e1, e.n_x);
      EXPECT_EQ(e.r1, -e.e_y * (mu + 1));
      EXPECT_EQ(e.r2, -e.e_y * (mu + 1 + 2 * b));
      EXPECT_EQ(remark_tau(mu, b), -e.r0 - 1);
      EXPECT_EQ(packing_profile(mu, b) * (mu + 1 + 2 * b), -e.r0 * (1 + b) * s1(mu, b));
    }
  }
}

TEST(Jarnik, TransferAndInverse) {
  EXPECT_EQ(jarnik_transfer(R(2)), R(1, 2));
  EXPECT_EQ(jarnik_transfer_at_infinity(), 1);
  for (Rational w : {R(2), R(5, 2), R(7), R(1001, 13)}) EXPECT_EQ(jarnik_inverse(jarnik_transfer(w)), w);
  EXPECT_THROW(jarnik_transfer(R(3, 2)), DomainError);
  EXPECT_THROW(jarnik_inverse(R(1)), DomainError);
}

TEST(UpperGamma, MuSixTenths) {
  UpperGamma g = upper_gamma(R(3, 5));
  EXPECT_EQ(g.gamma, R(35, 54));
  CoveringExponents c = covering_exponents(R(3, 5), g.gamma, g.t_crit);
  EXPECT_EQ(c.b, 2);
  EXPECT_EQ((c.b - 1) / (1 - R(3, 5)) - c.a, 2);
  EXPECT_EQ(c.B - c.b, 0);
  EXPECT_THROW(upper_gamma(R(71, 100)), DomainError);
}

TEST(UpperGamma, DegeneracyOnGrid) {
  for (int i = 1; i < 40; ++i) {
    Rational mu = R(1, 2) + R(i, 200);
    if (!below_branch_point(mu)) break;
    UpperGamma g = upper_gamma(mu);
    CoveringExponents c = covering_exponents(mu, g.gamma, g.t_crit);
    EXPECT_EQ(c.b, 2);
    EXPECT_EQ(c.B, c.b);
    EXPECT_EQ(g.t_crit * (1 - mu), upper_bound_dim(mu).exact_value());
  }
}

TEST(RemarkTau, Examples) {
  EXPECT_EQ(remark_tau(R(3, 5), R(1)), R(6, 5));
  EXPECT_LT(abs(remark_tau(R(3, 5), R(1000000)) - R(3, 2)), R(1, 100000));
}

TEST(Baker, Examples) {
  BakerBounds b = baker_bounds(R(3));
  EXPECT_EQ(b.baker_lower, R(2, 3));
  EXPECT_EQ(b.baker_upper, R(3, 2));
  EXPECT_EQ(b.laurent_upper, R(8, 7));
  EXPECT_EQ(b.dodson_upper, R(9, 7));
  BakerBounds big = baker_bounds(R(1000000));
  EXPECT_LT(big.baker_upper, R(1, 100000));
  EXPECT_EQ(transferred_bounds(R(1, 2)).upper, 2);
  EXPECT_THROW(baker_bounds(R(2)), DomainError);
  for (Rational tau : {R(3), R(7, 2), R(10)}) {
    TransferredBounds t = transferred_bounds(jarnik_transfer(tau));
    EXPECT_EQ(t.upper, baker_bounds(tau).dodson_upper);
    EXPECT_EQ(t.lower, baker_bounds(tau).baker_lower);
  }
}

TEST(FormulaTable, RowsAndColumns) {
  auto rows = formula_table(R(51, 100), R(99, 100), R(1, 200));
  EXPECT_EQ(rows.size(), 97u);
  EXPECT_TRUE(rows.front().b0.has_value());
  EXPECT_FALSE(rows.back().b0.has_value());
  EXPECT_EQ(rows.back().tau.exact_value(), R(99));
}
