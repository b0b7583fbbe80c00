#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace quantest {

struct QuadratureOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b].
///
/// Either bound may be infinite; half-lines are mapped onto [0, 1) with
/// x = a + t / (1 - t), and the whole line is split at zero. Endpoint
/// singularities are fine as long as they are integrable: the rule never
/// samples the endpoints.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Same as integrate(), after splitting [a, b] at the given interior
/// breakpoints (kinks, cusps, integrable singularities). Points outside
/// (a, b) are ignored.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureOptions& opts = {});

}  // namespace quantest
