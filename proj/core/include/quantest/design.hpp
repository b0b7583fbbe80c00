#pragma once

#include <cstddef>

#include <nlohmann/json_fwd.hpp>

#include "quantest/distributions.hpp"
#include "quantest/interval_density.hpp"
#include "quantest/quantizer.hpp"

namespace quantest {

/// What to design for: a distribution, the parameter to estimate and the
/// number of quantizer bits (N = 2^n_bits cells).
struct DesignSpec {
  Distribution dist;
  ParamKind kind = ParamKind::Location;
  int n_bits = 1;

  std::size_t intervals() const { return std::size_t{1} << n_bits; }
  /// Throws DomainError for n_bits outside [1, 20] or GGD location with
  /// beta <= 1 (the location score is not differentiable at mu).
  void validate() const;
};

/// lambda*(y) proportional to |dS/dy|^(2/3) f^(1/3), normalized. Closed-form
/// CDF and quantile for GGD (both kinds), Cauchy location and Student-t
/// scale; Student-t location with beta != 1 is inverted numerically.
IntervalDensity optimal_density(const DesignSpec& spec);

/// The same lambda* built from the generic score-derivative expression and
/// normalized by quadrature (no closed forms).
IntervalDensity optimal_density_numeric(const DesignSpec& spec);

/// tau_i = F_lambda^{-1}(i / N), i = 1..N-1, made exactly symmetric about mu.
Quantizer practical_thresholds(const DesignSpec& spec);

/// Thresholds at the i/N quantiles of `density`, always through the numeric
/// CDF table even when the density has closed forms.
Quantizer thresholds_from_density_numeric(const IntervalDensity& density, std::size_t n_intervals);

/// I_c - 2^(-2 N_B) / 12 * J^3 with J = int |dS/dy|^(2/3) f^(1/3) dy, from
/// closed forms where they exist and quadrature otherwise.
double asymptotic_fi(const DesignSpec& spec);
/// The same quantity with J always computed by quadrature.
double asymptotic_fi_quadrature(const DesignSpec& spec);
/// J itself, by quadrature.
double optimal_density_integral(const DesignSpec& spec);

/// I_c - 1 / (12 N^2) * int (dS/dy)^2 f / lambda^2 dy for any normalized
/// cell density. The integral runs over the support of `density`; a
/// bounded support must contain the distribution's 1e-12 truncation window
/// (mass outside it is neglected), and lambda may not vanish inside it
/// where the integrand numerator does not. Throws NumericalError otherwise.
double asymptotic_fi_general(const IntervalDensity& density, const DesignSpec& spec);

struct SearchResult {
  Quantizer quantizer;
  double fi = 0.0;
};

struct SearchOptions {
  double grid_step = 0.01;      // in units of delta
  double grid_half_width = 8.0; // in units of delta
  double refine_tol = 1e-9;     // threshold resolution of the final polish, units of delta
};

/// Maximizes quantized_fi over all interior thresholds. The search runs an
/// exact dynamic program over a threshold grid on [mu - 8 delta, mu + 8 delta]
/// and then polishes each threshold by coordinate ascent. With `symmetric`
/// the quantizer is constrained to be symmetric with its central threshold
/// at mu. Scale with n_bits = 1 is always searched without the constraint.
/// Requires n_bits <= 3.
SearchResult exhaustive_optimal_thresholds(const DesignSpec& spec, bool symmetric,
                                           const SearchOptions& opts = {});

/// Best quantizer of the form mu + (j - N/2) Delta, j = 1..N-1. Scale with
/// n_bits = 1 falls back to the best single (asymmetric) threshold.
SearchResult optimal_uniform_quantizer(const DesignSpec& spec);

void to_json(nlohmann::json& j, const DesignSpec& spec);
void from_json(const nlohmann::json& j, DesignSpec& spec);

}  // namespace quantest
