#include "quantest/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "quantest/error.hpp"

namespace quantest {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxTerms = 100000;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

// exp(a log y - y - log Gamma(a)), the common prefactor of the series and
// the continued fraction.
double gamma_prefactor(double a, double y) {
  return std::exp(a * std::log(y) - y - log_gamma_fn(a));
}

// P(a, y) by its power series; converges fast for y < a + 1.
double gamma_series(double a, double y) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxTerms; ++n) {
    ap += 1.0;
    term *= y / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) return sum * gamma_prefactor(a, y);
  }
  throw NoConvergence("incomplete gamma series did not converge");
}

// Q(a, y) by modified Lentz on its continued fraction; for y >= a + 1.
double gamma_continued_fraction(double a, double y) {
  double b = y + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h * gamma_prefactor(a, y);
  }
  throw NoConvergence("incomplete gamma continued fraction did not converge");
}

double beta_continued_fraction(double a, double b, double z) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * z / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * z / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NoConvergence("incomplete beta continued fraction did not converge");
}

double log_beta(double a, double b) {
  return log_gamma_fn(a) + log_gamma_fn(b) - log_gamma_fn(a + b);
}

// Newton iteration safeguarded by a bracket [lo, hi] on an increasing
// residual. `hi` may start infinite; it is then grown geometrically.
template <class Residual, class Slope>
double safeguarded_newton(Residual residual, Slope slope, double x, double lo, double hi,
                          double tol, int max_iter, const char* name) {
  for (int it = 0; it < max_iter; ++it) {
    const double r = residual(x);
    if (std::abs(r) <= tol) return x;
    if (r > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = slope(x);
    double next = (d > 0.0 && std::isfinite(d)) ? x - r / d : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : std::max(2.0 * x, x + 1.0);
    }
    if (std::abs(next - x) <= 4.0 * kEps * std::max(std::abs(x), kTiny)) return next;
    if (std::isfinite(hi) && hi - lo <= 4.0 * kEps * std::max(std::abs(hi), kTiny)) return next;
    x = next;
  }
  throw NoConvergence(std::string(name) + ": no convergence within max_iter iterations");
}

}  // namespace

void Accuracy::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1) {
    throw DomainError("Accuracy requires abs_tol > 0, rel_tol > 0 and max_iter >= 1");
  }
}

double Accuracy::tolerance_for(double target) const noexcept {
  return target == 0.0 ? abs_tol : std::min(abs_tol, rel_tol * std::abs(target));
}

double gamma_fn(double x) {
  require(x > 0.0, "gamma_fn: argument must be positive");
  return std::tgamma(x);
}

double log_gamma_fn(double x) {
  require(x > 0.0, "log_gamma_fn: argument must be positive");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

namespace detail {

double regularized_lower_gamma(double a, double y) {
  require(a > 0.0, "incomplete gamma: shape must be positive");
  require(y >= 0.0, "incomplete gamma: argument must be non-negative");
  if (y == 0.0) return 0.0;
  if (y == kInf) return 1.0;
  if (y < a + 1.0) return gamma_series(a, y);
  return 1.0 - gamma_continued_fraction(a, y);
}

double regularized_upper_gamma(double a, double y) {
  require(a > 0.0, "incomplete gamma: shape must be positive");
  require(y >= 0.0, "incomplete gamma: argument must be non-negative");
  if (y == 0.0) return 1.0;
  if (y == kInf) return 0.0;
  if (y < a + 1.0) return 1.0 - gamma_series(a, y);
  return gamma_continued_fraction(a, y);
}

double inverse_regularized_gamma(double a, double p, bool upper, const Accuracy& acc) {
  require(a > 0.0, "inverse incomplete gamma: shape must be positive");
  require(p >= 0.0 && p <= 1.0, "inverse incomplete gamma: probability outside [0, 1]");
  acc.validate();
  const double p_lower = upper ? 1.0 - p : p;
  if ((!upper && p == 0.0) || (upper && p == 1.0)) return 0.0;
  if ((!upper && p == 1.0) || (upper && p == 0.0)) return kInf;

  const double lga = log_gamma_fn(a);
  double x;
  if (a > 1.0) {
    const double pp = p_lower < 0.5 ? p_lower : 1.0 - p_lower;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p_lower < 0.5) z = -z;
    x = std::max(1e-3, a * std::pow(1.0 - 1.0 / (9.0 * a) - z / (3.0 * std::sqrt(a)), 3.0));
  } else {
    const double t = 1.0 - a * (0.253 + a * 0.12);
    x = p_lower < t ? std::pow(p_lower / t, 1.0 / a) : 1.0 - std::log1p(-(p_lower - t) / (1.0 - t));
  }
  if (!(x > 0.0) || !std::isfinite(x)) x = a;
  if (upper && p < 1e-8) {
    // Q(a, y) ~ y^(a-1) e^(-y) / Gamma(a) for large y.
    const double l = -std::log(p) - lga;
    x = std::max(x, l + (a - 1.0) * std::log(l));
  }

  const double tol = acc.tolerance_for(p);
  auto residual = [&](double y) {
    return upper ? p - regularized_upper_gamma(a, y) : regularized_lower_gamma(a, y) - p;
  };
  auto slope = [&](double y) { return std::exp((a - 1.0) * std::log(y) - y - lga); };
  return safeguarded_newton(residual, slope, x, 0.0, kInf, tol, acc.max_iter,
                            "inverse incomplete gamma");
}

double regularized_incomplete_beta(double z, double a, double b) {
  require(a > 0.0 && b > 0.0, "incomplete beta: parameters must be positive");
  require(z >= 0.0 && z <= 1.0, "incomplete beta: argument outside [0, 1]");
  if (z == 0.0) return 0.0;
  if (z == 1.0) return 1.0;
  const double front = std::exp(a * std::log(z) + b * std::log1p(-z) - log_beta(a, b));
  if (z < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, z) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - z) / b;
}

double inverse_regularized_beta(double p, double a, double b, const Accuracy& acc) {
  require(a > 0.0 && b > 0.0, "inverse incomplete beta: parameters must be positive");
  require(p >= 0.0 && p <= 1.0, "inverse incomplete beta: probability outside [0, 1]");
  acc.validate();
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  double x;
  if (a >= 1.0 && b >= 1.0) {
    const double pp = p < 0.5 ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) z = -z;
    const double al = (z * z - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = z * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    const double lna = std::log(a / (a + b));
    const double lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a;
    const double u = std::exp(b * lnb) / b;
    const double w = t + u;
    x = p < t / w ? std::pow(a * w * p, 1.0 / a) : 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
  }
  if (!(x > 0.0 && x < 1.0)) x = 0.5;

  const double lb = log_beta(a, b);
  const double tol = acc.tolerance_for(p);
  auto residual = [&](double z) { return regularized_incomplete_beta(z, a, b) - p; };
  auto slope = [&](double z) {
    return std::exp((a - 1.0) * std::log(z) + (b - 1.0) * std::log1p(-z) - lb);
  };
  return safeguarded_newton(residual, slope, x, 0.0, 1.0, tol, acc.max_iter,
                            "inverse incomplete beta");
}

}  // namespace detail

double lower_incomplete_gamma(double a, double y) {
  return detail::regularized_lower_gamma(a, y) * gamma_fn(a);
}

double inverse_lower_incomplete_gamma(double a, double g, const Accuracy& acc) {
  require(a > 0.0, "inverse_lower_incomplete_gamma: shape must be positive");
  const double total = gamma_fn(a);
  require(g >= 0.0 && g < total, "inverse_lower_incomplete_gamma: target outside [0, Gamma(a))");
  // Tolerances are stated on gamma(a, y); rescale to the regularized residual.
  Accuracy scaled = acc;
  scaled.abs_tol = acc.abs_tol / total;
  const double p = g / total;
  if (p > 0.5) return detail::inverse_regularized_gamma(a, (total - g) / total, true, scaled);
  return detail::inverse_regularized_gamma(a, p, false, scaled);
}

double beta_fn(double x, double y) {
  require(x > 0.0 && y > 0.0, "beta_fn: arguments must be positive");
  if (x + y < 100.0) return std::tgamma(x) * std::tgamma(y) / std::tgamma(x + y);
  return std::exp(log_beta(x, y));
}

double incomplete_beta(double z, double x, double y) {
  return detail::regularized_incomplete_beta(z, x, y) * beta_fn(x, y);
}

double inverse_incomplete_beta(double target, double x, double y, const Accuracy& acc) {
  require(x > 0.0 && y > 0.0, "inverse_incomplete_beta: parameters must be positive");
  const double total = beta_fn(x, y);
  require(target >= 0.0 && target <= total * (1.0 + 4.0 * kEps),
          "inverse_incomplete_beta: target outside [0, B(x, y)]");
  Accuracy scaled = acc;
  scaled.abs_tol = acc.abs_tol / total;
  const double p = std::min(target / total, 1.0);
  // Solve on whichever tail keeps the unknown small, so 1 - z never cancels.
  if (p > 0.5) {
    return 1.0 - detail::inverse_regularized_beta(1.0 - p, y, x, scaled);
  }
  return detail::inverse_regularized_beta(p, x, y, scaled);
}

double erf(double x) { return std::erf(x); }
double erfc(double x) { return std::erfc(x); }

double erf_inverse(double p, const Accuracy& acc) {
  require(p >= -1.0 && p <= 1.0, "erf_inverse: argument outside [-1, 1]");
  acc.validate();
  if (p == 0.0) return 0.0;
  if (p == 1.0) return kInf;
  if (p == -1.0) return -kInf;
  const double sign = p < 0.0 ? -1.0 : 1.0;
  const double a = std::abs(p);

  // Winitzki's approximation as the starting point.
  constexpr double k = 0.147;
  const double ln = std::log1p(-a * a);
  const double first = 2.0 / (std::numbers::pi * k) + 0.5 * ln;
  double x = std::sqrt(std::sqrt(first * first - ln / k) - first);

  const double c = 2.0 / std::sqrt(std::numbers::pi);
  // Residual on the complement near 1 keeps relative accuracy in the tail.
  const bool tail = a > 0.5;
  const double q = 1.0 - a;
  const double tol = acc.tolerance_for(tail ? q : a);
  auto residual = [&](double t) { return tail ? q - std::erfc(t) : std::erf(t) - a; };
  auto slope = [&](double t) { return c * std::exp(-t * t); };
  return sign * safeguarded_newton(residual, slope, x, 0.0, kInf, tol, acc.max_iter, "erf_inverse");
}

}  // namespace quantest
