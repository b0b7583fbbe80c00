#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "quantest/error.hpp"
#include "quantest/quadrature.hpp"

using namespace quantest;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Quadrature, Polynomial) {
  const auto r = integrate([](double x) { return 3 * x * x - 2 * x + 1; }, -1.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 9.0 - 3.0 + 3.0, 1e-13);
}

TEST(Quadrature, ReversedLimitsFlipSign) {
  const auto a = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  const auto b = integrate([](double x) { return std::exp(x); }, 1.0, 0.0);
  EXPECT_NEAR(a.value, std::exp(1.0) - 1.0, 1e-14);
  EXPECT_NEAR(b.value, -a.value, 1e-15);
}

TEST(Quadrature, EndpointSingularity) {
  // int_0^1 x^(-1/2) dx = 2
  const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, InfiniteRanges) {
  const auto gauss = integrate([](double x) { return std::exp(-x * x); }, -kInf, kInf);
  EXPECT_NEAR(gauss.value, std::sqrt(std::numbers::pi), 1e-13);
  const auto cauchy = integrate([](double x) { return 1.0 / (std::numbers::pi * (1 + x * x)); }, -kInf, kInf);
  EXPECT_NEAR(cauchy.value, 1.0, 1e-12);
  const auto upper = integrate([](double x) { return std::exp(-x); }, 2.0, kInf);
  EXPECT_NEAR(upper.value, std::exp(-2.0), 1e-15);
  const auto lower = integrate([](double x) { return std::exp(x); }, -kInf, -1.0);
  EXPECT_NEAR(lower.value, std::exp(-1.0), 1e-15);
}

TEST(Quadrature, HeavyTailMoment) {
  // int |x|^(2/3) f_Cauchy^(1/3)-like integrand with slow x^(-4/3) decay
  const auto r = integrate([](double x) { return std::pow(1.0 + x * x, -2.0 / 3.0); }, -kInf, kInf);
  // = sqrt(pi) Gamma(1/6) / Gamma(2/3)
  EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi) * std::tgamma(1.0 / 6.0) / std::tgamma(2.0 / 3.0), 1e-10);
}

TEST(Quadrature, BreakpointsHandleKinks) {
  auto f = [](double x) { return std::abs(x - 0.3) + std::abs(x + 0.7); };
  const std::vector<double> bp{-0.7, 0.3};
  const auto r = integrate(f, -2.0, 2.0, bp);
  // piecewise linear: exact value
  auto F = [](double a, double b) {
    auto g = [](double x, double c) { return x >= c ? 0.5 * (x - c) * (x - c) : -0.5 * (x - c) * (x - c); };
    return g(b, 0.3) - g(a, 0.3) + g(b, -0.7) - g(a, -0.7);
  };
  EXPECT_NEAR(r.value, F(-2.0, 2.0), 1e-13);
}

TEST(Quadrature, BreakpointsOutsideRangeIgnored) {
  const std::vector<double> bp{-10.0, 0.5, 10.0};
  const auto r = integrate([](double x) { return x; }, 0.0, 1.0, bp);
  EXPECT_NEAR(r.value, 0.5, 1e-15);
}

TEST(Quadrature, BudgetExhaustionIsReported) {
  QuadratureOptions opts;
  opts.max_intervals = 3;
  opts.abs_tol = 1e-300;
  opts.rel_tol = 1e-300;
  const auto r = integrate([](double x) { return std::sin(50 * x); }, 0.0, 10.0, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.intervals, 3u);
}

TEST(Quadrature, NonFiniteIntegrandThrows) {
  EXPECT_THROW(integrate([](double x) { return x > 0.5 ? std::nan("") : 1.0; }, 0.0, 1.0), NumericalError);
}
