#pragma once

// Special functions used by the densities, threshold maps and FI closed
// forms. Incomplete gamma and beta functions follow the unregularized
// convention:
//
//   gamma(a, y) = int_0^y w^(a-1) e^(-w) dw
//   I_z(x, y)   = int_0^z w^(x-1) (1-w)^(y-1) dw
//
// Regularized variants live in `detail` and are used internally.

namespace quantest {

/// Tolerances for the iterative inversions. An inversion stops when the
/// forward residual is within both abs_tol and rel_tol * |target|, or when
/// the iterate stops moving at working precision.
struct Accuracy {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_iter = 200;

  /// Throws DomainError unless abs_tol > 0, rel_tol > 0, max_iter >= 1.
  void validate() const;
  double tolerance_for(double target) const noexcept;
};

double gamma_fn(double x);
double log_gamma_fn(double x);

double lower_incomplete_gamma(double a, double y);

/// Solves gamma(a, y) = g for y. Requires 0 <= g < Gamma(a).
double inverse_lower_incomplete_gamma(double a, double g, const Accuracy& acc = {});

double beta_fn(double x, double y);

double incomplete_beta(double z, double x, double y);

/// Solves I_z(x, y) = target for z. Requires 0 <= target <= B(x, y).
double inverse_incomplete_beta(double target, double x, double y, const Accuracy& acc = {});

double erf(double x);
double erfc(double x);

/// Inverse error function on (-1, 1); +-1 map to +-infinity.
double erf_inverse(double p, const Accuracy& acc = {});

namespace detail {

/// P(a, y) = gamma(a, y) / Gamma(a).
double regularized_lower_gamma(double a, double y);
/// Q(a, y) = 1 - P(a, y), computed without cancellation for large y.
double regularized_upper_gamma(double a, double y);
/// Solves P(a, y) = p, or Q(a, y) = q when `upper` is set.
double inverse_regularized_gamma(double a, double p, bool upper, const Accuracy& acc);

/// I_z(a, b) / B(a, b).
double regularized_incomplete_beta(double z, double a, double b);
/// Solves I_z(a, b) / B(a, b) = p.
double inverse_regularized_beta(double p, double a, double b, const Accuracy& acc);

}  // namespace detail
}  // namespace quantest
