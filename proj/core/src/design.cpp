#include "quantest/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "quantest/error.hpp"
#include "quantest/quadrature.hpp"
#include "quantest/specfun.hpp"

namespace quantest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

const Accuracy kInverseAccuracy{1e-300, 1e-15, 400};

double sign_of(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

// Solves I_w(a, b) = p (regularized) and returns (w, 1 - w), each computed
// from the side that keeps it accurate.
std::pair<double, double> inverse_beta_pair(double p, double a, double b) {
  if (p <= 0.5) {
    const double w = detail::inverse_regularized_beta(p, a, b, kInverseAccuracy);
    return {w, 1.0 - w};
  }
  const double v = detail::inverse_regularized_beta(1.0 - p, b, a, kInverseAccuracy);
  return {1.0 - v, v};
}

// Two-sided mass 2 * min(p, 1 - p), exact for p = i / N.
double tail_mass(double p) { return 2.0 * std::min(p, 1.0 - p); }

bool is_cauchy(const Distribution& d) { return d.tag() == FamilyTag::STD && d.beta() == 1.0; }

std::vector<double> density_breakpoints(const DesignSpec& spec) {
  const Distribution& d = spec.dist;
  std::vector<double> bp{d.mu()};
  if (d.tag() == FamilyTag::STD && spec.kind == ParamKind::Location) {
    const double r = std::sqrt(d.beta()) * d.delta();
    bp.push_back(d.mu() - r);
    bp.push_back(d.mu() + r);
  }
  return bp;
}

IntervalDensity ggd_density(const DesignSpec& spec) {
  const Distribution& d = spec.dist;
  const double b = d.beta();
  const double mu = d.mu();
  const double delta = d.delta();
  const double e = spec.kind == ParamKind::Location ? (2.0 * b - 4.0) / 3.0 : (2.0 * b - 2.0) / 3.0;
  const double a = (e + 1.0) / b;
  const double cz = 2.0 * std::pow(3.0, a) * gamma_fn(a) / b;
  auto shape = [=](double y) {
    const double z = std::abs((y - mu) / delta);
    return std::pow(z, e) * std::exp(-std::pow(z, b) / 3.0);
  };
  auto cdf = [=](double y) {
    if (y == -kInf) return 0.0;
    if (y == kInf) return 1.0;
    const double z = (y - mu) / delta;
    const double half_tail = 0.5 * detail::regularized_upper_gamma(a, std::pow(std::abs(z), b) / 3.0);
    return z < 0.0 ? half_tail : 1.0 - half_tail;
  };
  auto quantile = [=](double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    if (p == 0.5) return mu;
    const double u = detail::inverse_regularized_gamma(a, tail_mass(p), true, kInverseAccuracy);
    return mu + sign_of(p - 0.5) * delta * std::pow(3.0 * u, 1.0 / b);
  };
  return IntervalDensity::closed(shape, delta * cz, {cdf, quantile}, -kInf, kInf, {mu}, mu, delta);
}

IntervalDensity cauchy_location_density(const DesignSpec& spec) {
  const double mu = spec.dist.mu();
  const double delta = spec.dist.delta();
  auto shape = [=](double y) {
    const double z = (y - mu) / delta;
    const double z2 = z * z;
    return std::pow(std::abs(1.0 - z2), 2.0 / 3.0) * std::pow(1.0 + z2, -5.0 / 3.0);
  };
  // With w = 4z^2/(1+z^2)^2 the mass between 0 and |z| <= 1 is a quarter of
  // I_w(1/2, 5/6); z -> 1/z maps [0, 1] onto [1, inf) with equal mass.
  auto cdf = [=](double y) {
    if (y == -kInf) return 0.0;
    if (y == kInf) return 1.0;
    const double z = (y - mu) / delta;
    const double a = std::abs(z);
    const double r = a <= 1.0 ? a : 1.0 / a;
    const double w = 4.0 * r * r / ((1.0 + r * r) * (1.0 + r * r));
    const double quarter = 0.25 * detail::regularized_incomplete_beta(std::min(w, 1.0), 0.5, 5.0 / 6.0);
    const double upper_tail = a <= 1.0 ? 0.5 - quarter : quarter;
    return z < 0.0 ? upper_tail : 1.0 - upper_tail;
  };
  auto quantile = [=](double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    if (p == 0.5) return mu;
    const double m = tail_mass(p);  // 1 - 2|p - 1/2|
    double z;
    if (m >= 0.5) {
      // |p - 1/2| <= 1/4
      const auto [w, v] = inverse_beta_pair(2.0 - 2.0 * m, 0.5, 5.0 / 6.0);
      z = std::sqrt(w) / (1.0 + std::sqrt(v));
    } else {
      const auto [w, v] = inverse_beta_pair(2.0 * m, 0.5, 5.0 / 6.0);
      z = (1.0 + std::sqrt(v)) / std::sqrt(w);
    }
    return mu + sign_of(p - 0.5) * delta * z;
  };
  return IntervalDensity::closed(shape, delta * beta_fn(0.5, 5.0 / 6.0), {cdf, quantile}, -kInf, kInf,
                                 {mu - delta, mu, mu + delta}, mu, delta);
}

IntervalDensity student_scale_density(const DesignSpec& spec) {
  const double b = spec.dist.beta();
  const double mu = spec.dist.mu();
  const double delta = spec.dist.delta();
  const double c = (b + 4.0) / 6.0;
  auto shape = [=](double y) {
    const double z = (y - mu) / delta;
    return std::pow(std::abs(z), 2.0 / 3.0) * std::pow(1.0 + z * z / b, -(9.0 + b) / 6.0);
  };
  auto cdf = [=](double y) {
    if (y == -kInf) return 0.0;
    if (y == kInf) return 1.0;
    const double z = (y - mu) / delta;
    const double v = b / (b + z * z);
    const double half_tail = 0.5 * detail::regularized_incomplete_beta(v, c, 5.0 / 6.0);
    return z < 0.0 ? half_tail : 1.0 - half_tail;
  };
  auto quantile = [=](double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    if (p == 0.5) return mu;
    // I_w(5/6, c) = |2p - 1| with w = z^2 / (beta + z^2).
    const auto [w, v] = inverse_beta_pair(1.0 - tail_mass(p), 5.0 / 6.0, c);
    return mu + sign_of(p - 0.5) * delta * std::sqrt(b * w / v);
  };
  const double norm = delta * std::pow(b, 5.0 / 6.0) * beta_fn(5.0 / 6.0, c);
  return IntervalDensity::closed(shape, norm, {cdf, quantile}, -kInf, kInf, {mu}, mu, delta);
}

IntervalDensity student_location_density(const DesignSpec& spec) {
  const double b = spec.dist.beta();
  const double mu = spec.dist.mu();
  const double delta = spec.dist.delta();
  auto shape = [=](double y) {
    const double z = (y - mu) / delta;
    const double u = z * z / b;
    return std::pow(std::abs(1.0 - u), 2.0 / 3.0) * std::pow(1.0 + u, -(9.0 + b) / 6.0);
  };
  return IntervalDensity::numeric(shape, -kInf, kInf, density_breakpoints(spec), mu, delta);
}

// |dS/dy|^(2/3) f^(1/3) straight from the distribution's score derivative.
std::function<double(double)> generic_shape(const DesignSpec& spec) {
  const Distribution d = spec.dist;
  const ParamKind kind = spec.kind;
  return [d, kind](double y) {
    double ds;
    try {
      ds = d.score_y_derivative(kind, y);
    } catch (const DomainError&) {
      return kInf;  // integrable singularity at y = mu
    }
    const double f = d.pdf(y);
    if (f == 0.0) return 0.0;  // far tail, where ds can overflow
    return std::pow(ds * ds, 1.0 / 3.0) * std::cbrt(f);
  };
}

// Densities are built for mu = 0, delta = 1 and mapped afterwards; the
// singular point then sits at 0 where doubles are dense.
DesignSpec standardized(const DesignSpec& spec) {
  DesignSpec s = spec;
  s.dist = spec.dist.standardized();
  return s;
}

QuadratureOptions tight() {
  QuadratureOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-14;
  o.max_intervals = 20000;
  return o;
}

}  // namespace

void DesignSpec::validate() const {
  if (n_bits < 1 || n_bits > 20) throw DomainError("number of bits must lie in [1, 20]");
  if (dist.tag() == FamilyTag::GGD && kind == ParamKind::Location && dist.beta() <= 1.0) {
    throw DomainError(
        "GGD location design requires beta > 1: the derivative of the score does not exist at y = mu");
  }
}

IntervalDensity optimal_density(const DesignSpec& spec) {
  spec.validate();
  const DesignSpec s = standardized(spec);
  IntervalDensity base = s.dist.tag() == FamilyTag::GGD  ? ggd_density(s)
                         : s.kind == ParamKind::Scale  ? student_scale_density(s)
                         : is_cauchy(s.dist)           ? cauchy_location_density(s)
                                                       : student_location_density(s);
  return base.affine(spec.dist.mu(), spec.dist.delta());
}

IntervalDensity optimal_density_numeric(const DesignSpec& spec) {
  spec.validate();
  const DesignSpec s = standardized(spec);
  return IntervalDensity::numeric(generic_shape(s), -kInf, kInf, density_breakpoints(s), 0.0, 1.0)
      .affine(spec.dist.mu(), spec.dist.delta());
}

Quantizer practical_thresholds(const DesignSpec& spec) {
  const IntervalDensity lambda = optimal_density(spec);
  const std::size_t n = spec.intervals();
  const double mu = spec.dist.mu();
  std::vector<double> tau(n - 1);
  for (std::size_t i = 1; i < n / 2; ++i) {
    const double offset = mu - lambda.quantile(static_cast<double>(i) / static_cast<double>(n));
    tau[i - 1] = mu - offset;
    tau[n - i - 1] = mu + offset;
  }
  tau[n / 2 - 1] = mu;
  return Quantizer(std::move(tau));
}

Quantizer thresholds_from_density_numeric(const IntervalDensity& density, std::size_t n_intervals) {
  if (n_intervals < 2) throw DomainError("thresholds_from_density_numeric: need at least 2 intervals");
  const IntervalDensity numeric = density.as_numeric();
  std::vector<double> tau(n_intervals - 1);
  for (std::size_t i = 1; i < n_intervals; ++i) {
    tau[i - 1] = numeric.quantile(static_cast<double>(i) / static_cast<double>(n_intervals));
  }
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (!(tau[i] > tau[i - 1])) {
      throw NumericalError("thresholds_from_density_numeric: thresholds not increasing; grid too coarse");
    }
  }
  return Quantizer(std::move(tau));
}

double optimal_density_integral(const DesignSpec& spec) {
  spec.validate();
  // The shape scales as delta^(-5/3) under y = mu + delta z.
  const DesignSpec s = standardized(spec);
  const double j = integrate(generic_shape(s), -kInf, kInf, density_breakpoints(s), tight()).value;
  return j * std::pow(spec.dist.delta(), -2.0 / 3.0);
}

double asymptotic_fi_quadrature(const DesignSpec& spec) {
  const double j = optimal_density_integral(spec);
  const double ic = spec.dist.continuous_fi(spec.kind);
  return ic - std::ldexp(1.0, -2 * spec.n_bits) / 12.0 * j * j * j;
}

double asymptotic_fi(const DesignSpec& spec) {
  spec.validate();
  const double b = spec.dist.beta();
  const double d2 = spec.dist.delta() * spec.dist.delta();
  const double r = std::ldexp(1.0, -2 * spec.n_bits);
  if (spec.dist.tag() == FamilyTag::GGD) {
    if (spec.kind == ParamKind::Location) {
      const double g = gamma_fn((2.0 - 1.0 / b) / 3.0);
      return (b - 1.0) / gamma_fn(1.0 / b) / d2 *
             (b * gamma_fn(1.0 - 1.0 / b) - r * (b - 1.0) * std::pow(3.0, 1.0 - 1.0 / b) * g * g * g);
    }
    const double g = gamma_fn((2.0 + 1.0 / b) / 3.0);
    return b / d2 * (1.0 - r * std::pow(3.0, 1.0 + 1.0 / b) * b * g * g * g / gamma_fn(1.0 / b));
  }
  if (spec.kind == ParamKind::Scale) {
    const double bb = beta_fn(5.0 / 6.0, (b + 4.0) / 6.0);
    return (3.0 * (b + 1.0) / (b + 3.0) - 1.0 -
            r * (b + 1.0) * (b + 1.0) * bb * bb * bb / (3.0 * beta_fn(0.5, b / 2.0))) /
           d2;
  }
  if (b == 1.0) {
    const double bb = beta_fn(0.5, 5.0 / 6.0);
    return 0.5 / d2 * (1.0 - bb * bb * bb / (3.0 * kPi) * 2.0 * r);
  }
  return asymptotic_fi_quadrature(spec);
}

double asymptotic_fi_general(const IntervalDensity& density, const DesignSpec& spec) {
  spec.validate();
  const Distribution& d = spec.dist;
  const double lo = density.lower();
  const double hi = density.upper();
  if (std::isfinite(lo) || std::isfinite(hi)) {
    const double t = d.truncation_half_width(1e-12) * d.delta();
    if (lo > d.mu() - t || hi < d.mu() + t) {
      throw NumericalError("asymptotic_fi_general: density support does not cover the truncation window");
    }
  }
  const ParamKind kind = spec.kind;
  auto integrand = [&](double y) {
    const double ds = d.score_y_derivative(kind, y);
    const double num = ds * ds * d.pdf(y);
    if (num == 0.0) return 0.0;
    const double lam = density(y);
    if (!(lam > 0.0)) {
      throw NumericalError("asymptotic_fi_general: diverges, the density vanishes where the loss does not");
    }
    return num / (lam * lam);
  };
  std::vector<double> bp = density.breakpoints();
  const std::vector<double> own = density_breakpoints(spec);
  bp.insert(bp.end(), own.begin(), own.end());
  const double loss = integrate(integrand, lo, hi, bp, tight()).value;
  const double n = static_cast<double>(spec.intervals());
  return d.continuous_fi(kind) - loss / (12.0 * n * n);
}

void to_json(nlohmann::json& j, const DesignSpec& spec) {
  j = nlohmann::json{{"dist", spec.dist}, {"param", to_string(spec.kind)}, {"bits", spec.n_bits}};
}

void from_json(const nlohmann::json& j, DesignSpec& spec) {
  spec.dist = j.at("dist").get<Distribution>();
  spec.kind = parse_param_kind(j.at("param").get<std::string>());
  spec.n_bits = j.at("bits").get<int>();
}

}  // namespace quantest
