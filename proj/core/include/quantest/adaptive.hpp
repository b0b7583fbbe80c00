#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quantest/design.hpp"
#include "quantest/quantizer.hpp"

namespace quantest {

enum class EstimatorMode { LocationOnly, ScaleOnly, Joint };

std::string to_string(EstimatorMode mode);
EstimatorMode parse_estimator_mode(const std::string& s);

/// Normalized thresholds tau' and output coefficients eta of a static
/// quantizer, with the quantized FI at the reference parameters
/// (mu = 0, delta = 1).
struct StaticQuantizerSpec {
  ParamKind kind = ParamKind::Location;
  Quantizer thresholds{std::vector<double>{0.0}};
  std::vector<double> coefficients;
  double fi_ref = 0.0;
};

/// Location thresholds together with both coefficient sets, for the joint
/// estimator.
struct JointStaticQuantizer {
  Quantizer thresholds{std::vector<double>{0.0}};
  std::vector<double> eta_mu;
  std::vector<double> eta_delta;
  double fi_mu = 0.0;
  double fi_delta = 0.0;
};

/// Practical thresholds of `spec` at the reference parameters.
StaticQuantizerSpec make_static_quantizer(const DesignSpec& spec);
/// Static quantizer from arbitrary normalized thresholds.
StaticQuantizerSpec make_static_quantizer(const Quantizer& normalized, const Family& family, ParamKind kind);
/// Location design of `spec` (kind is ignored) with location and scale
/// coefficients.
JointStaticQuantizer make_joint_static_quantizer(const DesignSpec& spec);
JointStaticQuantizer make_joint_static_quantizer(const Quantizer& normalized, const Family& family);

struct EstimatorState {
  double mu_hat = 0.0;
  double delta_hat = 1.0;
  std::uint64_t k = 0;
  EstimatorMode mode = EstimatorMode::LocationOnly;
  /// delta_hat never drops below this; set from the initial estimate.
  double delta_floor = 0.0;
  /// One update never shrinks delta_hat below this fraction of its previous
  /// value; 0 disables the limit.
  double shrink_limit = 0.0;
};

/// Starting state; the scale floor is 1e-9 of the initial scale estimate.
EstimatorState initial_state(EstimatorMode mode, double mu_hat0, double delta_hat0, double shrink_limit = 0.0);

/// mu_k = mu_{k-1} + delta / (k I_q) * eta((y - mu_{k-1}) / delta).
EstimatorState step_location(const EstimatorState& state, const StaticQuantizerSpec& s, double y,
                             double known_delta);
/// delta_k = delta_{k-1} + delta_{k-1} / (k I_q) * eta((y - mu) / delta_{k-1}).
EstimatorState step_scale(const EstimatorState& state, const StaticQuantizerSpec& s, double y, double known_mu);

struct JointOptions {
  /// Off holds delta_hat fixed, reducing the joint update to step_location.
  bool update_scale = true;
};

/// Both updates driven by one quantized sample of (y - mu_{k-1}) / delta_{k-1}
/// with gains (delta_{k-1} / k) diag(1 / I_q^mu, 1 / I_q^delta).
EstimatorState step_joint(const EstimatorState& state, const JointStaticQuantizer& s, double y,
                          const JointOptions& opts = {});

/// Expected update of eta under the distribution at reference parameters,
/// sum_i eta(i) P(i); zero for an unbiased design.
double expected_update(const Quantizer& normalized, const std::vector<double>& eta, const Family& family);

}  // namespace quantest
