#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "quantest/design.hpp"
#include "quantest/error.hpp"
#include "quantest/interval_density.hpp"

using namespace quantest;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(IntervalDensity, Uniform) {
  const auto u = IntervalDensity::uniform(-2.0, 6.0);
  EXPECT_DOUBLE_EQ(u(0.0), 0.125);
  EXPECT_EQ(u(7.0), 0.0);
  EXPECT_DOUBLE_EQ(u.cdf(0.0), 0.25);
  EXPECT_DOUBLE_EQ(u.quantile(0.75), 4.0);
  EXPECT_THROW(IntervalDensity::uniform(1.0, 1.0), DomainError);
}

TEST(CdfTable, LaplaceShape) {
  // shape e^{-|x|} has CDF e^x / 2 for x < 0
  CdfTable t([](double x) { return std::exp(-std::abs(x)); }, -kInf, kInf, {0.0}, 0.0, 1.0);
  EXPECT_NEAR(t.total(), 2.0, 1e-12);
  for (double x : {-30.0, -5.0, -0.3, 0.0, 0.9, 12.0}) {
    const double ref = x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
    EXPECT_NEAR(t.cdf(x), ref, 1e-13 + 1e-10 * std::min(ref, 1 - ref)) << x;
  }
  for (double p : {1e-10, 0.01, 0.3, 0.5, 0.8, 1 - 1e-9}) {
    const double ref = p < 0.5 ? std::log(2 * p) : -std::log(2 * (1 - p));
    EXPECT_NEAR(t.quantile(p), ref, 1e-8 * std::max(1.0, std::abs(ref))) << p;
  }
}

TEST(CdfTable, HeavyTailedShape) {
  // Cauchy shape; CDF 1/2 + atan(x)/pi
  CdfTable t([](double x) { return 1.0 / (1.0 + x * x); }, -kInf, kInf, {}, 0.0, 1.0);
  EXPECT_NEAR(t.total(), std::numbers::pi, 1e-10);
  for (double x : {-1e4, -3.0, 0.2, 50.0}) {
    EXPECT_NEAR(t.cdf(x), 0.5 + std::atan(x) / std::numbers::pi, 1e-11) << x;
  }
  for (double p : {1e-6, 0.1, 0.5, 0.97}) {
    EXPECT_NEAR(t.quantile(p), std::tan(std::numbers::pi * (p - 0.5)), 1e-8 * std::max(1.0, 1 / p)) << p;
  }
}

TEST(CdfTable, ZeroAtInteriorPoint) {
  // |1 - x^2|^(2/3) e^{-x^2}: vanishes at x = +-1, kink there
  auto shape = [](double x) { return std::pow(std::abs(1 - x * x), 2.0 / 3.0) * std::exp(-x * x); };
  CdfTable t(shape, -kInf, kInf, {-1.0, 1.0}, 0.0, 1.0);
  double prev = -kInf;
  for (int i = 1; i < 64; ++i) {
    const double q = t.quantile(i / 64.0);
    EXPECT_GT(q, prev);
    EXPECT_NEAR(t.cdf(q), i / 64.0, 1e-12);
    prev = q;
  }
  EXPECT_NEAR(t.cdf(0.0), 0.5, 1e-13);
}

TEST(IntervalDensity, ClosedAndNumericFormsAgree) {
  const DesignSpec specs[] = {
      {Distribution::ggd(2.0), ParamKind::Location, 4},       {Distribution::ggd(1.5, 1.0, 2.0), ParamKind::Location, 4},
      {Distribution::ggd(3.0), ParamKind::Scale, 4},          {Distribution::ggd(1.0, 0.0, 0.5), ParamKind::Scale, 4},
      {Distribution::student(1.0), ParamKind::Location, 4},   {Distribution::student(1.0, 2.0, 3.0), ParamKind::Scale, 4},
      {Distribution::student(3.0), ParamKind::Scale, 4}};
  for (const auto& s : specs) {
    const IntervalDensity closed = optimal_density(s);
    ASSERT_TRUE(closed.has_closed_form()) << describe(s.dist);
    const IntervalDensity numeric = optimal_density_numeric(s);
    for (double z = -6.0; z <= 6.0; z += 0.61) {
      const double y = s.dist.mu() + s.dist.delta() * z;
      EXPECT_NEAR(closed(y), numeric(y), 1e-10 * numeric(y) + 1e-300) << describe(s.dist) << ' ' << z;
      EXPECT_NEAR(closed.cdf(y), numeric.cdf(y), 1e-11) << describe(s.dist) << ' ' << z;
    }
    for (double p : {0.001, 0.1, 0.37, 0.5, 0.9}) {
      const double a = closed.quantile(p);
      EXPECT_NEAR(a, numeric.quantile(p), 1e-9 * std::max(1.0, std::abs(a))) << describe(s.dist) << ' ' << p;
      EXPECT_NEAR(closed.as_numeric().quantile(p), a, 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
}
