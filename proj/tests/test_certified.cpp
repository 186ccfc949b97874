#include <gtest/gtest.h>

#include "singvec/certified.hpp"
#include "singvec/number.hpp"

using namespace singvec;

TEST(Number, ParseRationalForms) {
  EXPECT_EQ(parse_rational("3/5"), Rational(3, 5));
  EXPECT_EQ(parse_rational("0.6"), Rational(3, 5));
  EXPECT_EQ(parse_rational("-1.25"), Rational(-5, 4));
  EXPECT_EQ(parse_rational("1e6"), Rational(1000000));
  EXPECT_EQ(parse_rational("2.5e-3"), Rational(1, 400));
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
}

TEST(Number, FloorCeilRound) {
  EXPECT_EQ(floor(Rational(-7, 2)), -4);
  EXPECT_EQ(ceil(Rational(-7, 2)), -3);
  EXPECT_EQ(round_half_down(Rational(5, 2)), 2);
  EXPECT_EQ(round_half_up(Rational(5, 2)), 3);
  EXPECT_EQ(floor_sqrt(Rational(17, 4)), 2);
}

TEST(Certified, SqrtTwoEnclosure) {
  CertifiedReal s = sqrt(CertifiedReal(2));
  Rational lo = s.lower(256), hi = s.upper(256);
  EXPECT_LE(lo * lo, 2);
  EXPECT_GE(hi * hi, 2);
  EXPECT_LT(hi - lo, Rational(1, 1000000) * Rational(1, 1000000));
}

TEST(Certified, ExactArithmeticStaysExact) {
  CertifiedReal a = Rational(1, 3), b = Rational(1, 6);
  CertifiedReal c = a + b;
  ASSERT_TRUE(c.is_exact());
  EXPECT_EQ(c.exact_value(), Rational(1, 2));
  EXPECT_TRUE(sqrt(CertifiedReal(Rational(4, 9))).is_exact());
}

TEST(Certified, CompareRefines) {
  CertifiedReal s = sqrt(CertifiedReal(2));
  CertifiedReal near = Rational(Integer("14142135623730950488016887242096"), Integer("10000000000000000000000000000000"));
  EXPECT_EQ(compare(s, near), 1);
  EXPECT_THROW(compare(s * s, CertifiedReal(2)), TieBreak);
}

TEST(Certified, FloorOfPower) {
  CertifiedReal v = pow(CertifiedReal(32), CertifiedReal(Rational(5, 2)));
  EXPECT_EQ(floor(v), 5792);
  EXPECT_EQ(ceil(v), 5793);
}

TEST(Certified, DyadicRoundingIsBelow) {
  CertifiedReal v = sqrt(CertifiedReal(3));
  Rational r = round_down_dyadic(v);
  EXPECT_LE(r * r, 3);
  EXPECT_EQ(power_of_two_below(v), 1);
  EXPECT_EQ(power_of_two_below(CertifiedReal(Rational(3, 16))), Rational(1, 8));
}

TEST(Certified, DecimalRendering) {
  EXPECT_EQ(CertifiedReal(Rational(1, 4)).decimal(5), "2.5000e-01");
}
