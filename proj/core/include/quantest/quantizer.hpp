#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "quantest/distributions.hpp"

namespace quantest {

/// Scalar quantizer given by its strictly increasing interior thresholds
/// tau_1 < ... < tau_{N-1}. The outer thresholds are tau_0 = -inf and
/// tau_N = +inf, so the N cells cover the real line. Cell i (1-based) is
/// [tau_{i-1}, tau_i).
class Quantizer {
 public:
  explicit Quantizer(std::vector<double> interior_thresholds);

  std::size_t intervals() const noexcept { return tau_.size() + 1; }
  const std::vector<double>& thresholds() const noexcept { return tau_; }
  /// tau_i for i in [0, N], with the infinite outer thresholds.
  double threshold(std::size_t i) const;

  /// Cell index in 1..N.
  std::size_t quantize(double y) const;

  /// Thresholds mapped by t -> shift + scale * t (scale > 0).
  Quantizer affine(double shift, double scale) const;
  /// Copy with one more threshold; throws if t is already present.
  Quantizer refined(double t) const;

  bool operator==(const Quantizer& other) const = default;

 private:
  std::vector<double> tau_;
};

struct CellProbabilities {
  std::vector<double> probs;
  /// Set when some cell has probability below 1e-15.
  bool degenerate = false;
};

CellProbabilities cell_probs(const Quantizer& q, const Distribution& d);

/// dP(i)/dmu or dP(i)/ddelta for every cell, from the density at the cell
/// edges.
std::vector<double> cell_prob_derivatives(const Quantizer& q, const Distribution& d, ParamKind kind);

struct QuantizedFi {
  double value = 0.0;
  /// Cells with P = 0; they contribute nothing.
  std::size_t zero_cells = 0;
  bool degenerate = false;
};

QuantizedFi quantized_fi_report(const Quantizer& q, const Distribution& d, ParamKind kind);

/// Fisher information of one quantized measurement,
/// sum_i (dP(i)/dtheta)^2 / P(i).
double quantized_fi(const Quantizer& q, const Distribution& d, ParamKind kind);

/// eta(i) = (dP(i)/dtheta) / P(i) at the parameters of `d`; zero for cells
/// with P = 0.
std::vector<double> score_coefficients(const Quantizer& q, const Distribution& d, ParamKind kind);

/// Rows i, tau_i, P_i, eta_i for i = 1..N (tau_N printed as inf).
void write_cell_table_csv(std::ostream& os, const Quantizer& q, const Distribution& d, ParamKind kind);

void to_json(nlohmann::json& j, const Quantizer& q);
Quantizer quantizer_from_json(const nlohmann::json& j);

}  // namespace quantest
