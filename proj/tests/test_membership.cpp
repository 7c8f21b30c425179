#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "autometric/error.hpp"
#include "autometric/membership.hpp"
#include "oracle.hpp"

using namespace autometric;

TEST(Membership, TrapezoidShoulderAndEdges) {
  const auto low = MembershipFunction::trapezoid(0, 0, 40, 80);
  EXPECT_DOUBLE_EQ(low(20), 1.0);
  EXPECT_DOUBLE_EQ(low(0), 1.0);
  EXPECT_DOUBLE_EQ(low(60), 0.5);
  EXPECT_DOUBLE_EQ(low(80), 0.0);
  EXPECT_DOUBLE_EQ(low(100), 0.0);

  const auto high = MembershipFunction::trapezoid(40, 80, 100, 100);
  EXPECT_DOUBLE_EQ(high(20), 0.0);
  EXPECT_DOUBLE_EQ(high(60), 0.5);
  EXPECT_DOUBLE_EQ(high(100), 1.0);
}

TEST(Membership, DegenerateRightEdgeIsStep) {
  const auto f = MembershipFunction::trapezoid(2, 3, 5, 5);
  EXPECT_DOUBLE_EQ(f(5), 1.0);
  EXPECT_DOUBLE_EQ(f(5.0001), 0.0);
  const auto g = MembershipFunction::trapezoid(3, 3, 4, 6);
  EXPECT_DOUBLE_EQ(g(3), 1.0);
  EXPECT_DOUBLE_EQ(g(2.9999), 0.0);
}

TEST(Membership, SplineCrossovers) {
  EXPECT_DOUBLE_EQ(MembershipFunction::z_spline(7, 10)(8.5), 0.5);
  EXPECT_DOUBLE_EQ(MembershipFunction::s_spline(4, 7)(5.5), 0.5);
  EXPECT_DOUBLE_EQ(MembershipFunction::z_spline(7, 10)(7), 1.0);
  EXPECT_DOUBLE_EQ(MembershipFunction::z_spline(7, 10)(10), 0.0);
  EXPECT_DOUBLE_EQ(MembershipFunction::s_spline(4, 7)(4), 0.0);
  EXPECT_DOUBLE_EQ(MembershipFunction::s_spline(4, 7)(7), 1.0);
  // quarter point: 1 - 2 * 0.25^2
  EXPECT_NEAR(MembershipFunction::z_spline(0, 4)(1), 0.875, 1e-15);
}

TEST(Membership, BellAndGaussianPeaks) {
  EXPECT_DOUBLE_EQ(MembershipFunction::generalized_bell(4.5, 3, 1)(1), 1.0);
  EXPECT_DOUBLE_EQ(MembershipFunction::gaussian(1, 7)(7), 1.0);
  EXPECT_NEAR(MembershipFunction::generalized_bell(4.5, 3, 1)(5.5), 0.5, 1e-15);
  EXPECT_NEAR(MembershipFunction::gaussian(1, 7)(8), std::exp(-0.5), 1e-15);
}

TEST(Membership, NanGivesZero) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(MembershipFunction::trapezoid(0, 1, 2, 3)(nan), 0.0);
  EXPECT_EQ(MembershipFunction::gaussian(1, 0)(nan), 0.0);
}

TEST(Membership, ValidationReportsOrdering) {
  try {
    MembershipFunction(MfShape::trapezoid, {5, 4, 3, 2});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations().size(), 1u);
  }
  EXPECT_THROW(MembershipFunction::z_spline(3, 3), ValidationError);
  EXPECT_THROW(MembershipFunction::gaussian(0, 1), ValidationError);
  EXPECT_THROW(MembershipFunction::generalized_bell(1, -1, 0), ValidationError);
  EXPECT_THROW(MembershipFunction(MfShape::gaussian, {1, 2, 3}), ValidationError);
  EXPECT_THROW(MembershipFunction::trapezoid(0, 1, std::numeric_limits<double>::infinity(), 3), ValidationError);
}

TEST(Membership, UncheckedCollectsViolationsAndStaysSafe) {
  const std::vector<double> params{1, 2, 3, 4, 5};
  const auto f = MembershipFunction::unchecked(MfShape::trapezoid, params);
  EXPECT_FALSE(f.violations().empty());
  const double v = f(2.5);
  EXPECT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST(Membership, ShapeNames) {
  EXPECT_EQ(shape_name(MfShape::generalized_bell), "gbellmf");
  EXPECT_EQ(parse_shape("gbelfm"), MfShape::generalized_bell);
  EXPECT_EQ(parse_shape("trapmf"), MfShape::trapezoid);
  EXPECT_EQ(parse_shape("s_spline"), MfShape::s_spline);
  EXPECT_FALSE(parse_shape("trimf").has_value());
  EXPECT_EQ(shape_arity(MfShape::trapezoid), 4u);
  EXPECT_EQ(shape_arity(MfShape::gaussian), 2u);
}

namespace {

MembershipFunction random_mf(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-20, 20);
  std::uniform_real_distribution<double> pos(0.05, 10);
  switch (rng() % 5) {
    case 0: {
      std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
      std::sort(p.begin(), p.end());
      if (rng() % 4 == 0) p[1] = p[0];
      if (rng() % 4 == 0) p[3] = p[2];
      return MembershipFunction::trapezoid(p[0], p[1], p[2], p[3]);
    }
    case 1: {
      const double a = u(rng);
      return MembershipFunction::z_spline(a, a + pos(rng));
    }
    case 2: {
      const double a = u(rng);
      return MembershipFunction::s_spline(a, a + pos(rng));
    }
    case 3: return MembershipFunction::generalized_bell(pos(rng), pos(rng), u(rng));
    default: return MembershipFunction::gaussian(pos(rng), u(rng));
  }
}

}  // namespace

TEST(MembershipProperty, BoundedAndMatchesOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> x(-40, 40);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto f = random_mf(rng);
    for (int k = 0; k < 20; ++k) {
      const double xi = x(rng);
      const double v = f(xi);
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
      ASSERT_NEAR(v, oracle::mf(f, xi), 1e-12);
    }
  }
}

TEST(MembershipProperty, SplineComplementarityAndMonotonicity) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_real_distribution<double> w(0.01, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = u(rng);
    const double b = a + w(rng);
    const auto z = MembershipFunction::z_spline(a, b);
    const auto s = MembershipFunction::s_spline(a, b);
    double prev_z = 2.0;
    double prev_s = -1.0;
    for (int k = 0; k <= 50; ++k) {
      const double xi = a + (b - a) * k / 50.0;
      ASSERT_NEAR(z(xi) + s(xi), 1.0, 1e-12);
      ASSERT_LE(z(xi), prev_z);
      ASSERT_GE(s(xi), prev_s);
      prev_z = z(xi);
      prev_s = s(xi);
    }
  }
}

TEST(MembershipProperty, TrapezoidEdgesMonotone) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
    std::sort(p.begin(), p.end());
    const auto f = MembershipFunction::trapezoid(p[0], p[1], p[2], p[3]);
    for (int k = 0; k < 50; ++k) {
      const double x0 = p[0] + (p[1] - p[0]) * k / 50.0;
      const double x1 = p[0] + (p[1] - p[0]) * (k + 1) / 50.0;
      ASSERT_LE(f(x0), f(x1) + 1e-15);
      const double y0 = p[2] + (p[3] - p[2]) * k / 50.0;
      const double y1 = p[2] + (p[3] - p[2]) * (k + 1) / 50.0;
      ASSERT_GE(f(y0) + 1e-15, f(y1));
    }
  }
}
