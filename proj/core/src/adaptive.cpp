#include "quantest/adaptive.hpp"

#include <algorithm>

#include "quantest/error.hpp"

namespace quantest {
namespace {

Distribution reference(const Family& family) { return Distribution(family, 0.0, 1.0); }

}  // namespace

std::string to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::LocationOnly:
      return "location";
    case EstimatorMode::ScaleOnly:
      return "scale";
    case EstimatorMode::Joint:
      return "joint";
  }
  return "location";
}

EstimatorMode parse_estimator_mode(const std::string& s) {
  if (s == "location") return EstimatorMode::LocationOnly;
  if (s == "scale") return EstimatorMode::ScaleOnly;
  if (s == "joint") return EstimatorMode::Joint;
  throw DomainError("unknown mode '" + s + "' (expected location, scale or joint)");
}

StaticQuantizerSpec make_static_quantizer(const Quantizer& normalized, const Family& family, ParamKind kind) {
  const Distribution ref = reference(family);
  StaticQuantizerSpec s;
  s.kind = kind;
  s.thresholds = normalized;
  s.coefficients = score_coefficients(normalized, ref, kind);
  s.fi_ref = quantized_fi(normalized, ref, kind);
  if (!(s.fi_ref > 0.0)) {
    throw DomainError("static quantizer carries no Fisher information for this parameter");
  }
  return s;
}

StaticQuantizerSpec make_static_quantizer(const DesignSpec& spec) {
  DesignSpec ref = spec;
  ref.dist = spec.dist.standardized();
  return make_static_quantizer(practical_thresholds(ref), spec.dist.family(), spec.kind);
}

JointStaticQuantizer make_joint_static_quantizer(const Quantizer& normalized, const Family& family) {
  const Distribution ref = reference(family);
  JointStaticQuantizer s;
  s.thresholds = normalized;
  s.eta_mu = score_coefficients(normalized, ref, ParamKind::Location);
  s.eta_delta = score_coefficients(normalized, ref, ParamKind::Scale);
  s.fi_mu = quantized_fi(normalized, ref, ParamKind::Location);
  s.fi_delta = quantized_fi(normalized, ref, ParamKind::Scale);
  if (!(s.fi_mu > 0.0) || !(s.fi_delta > 0.0)) {
    throw DomainError("joint static quantizer needs positive information for both parameters");
  }
  return s;
}

JointStaticQuantizer make_joint_static_quantizer(const DesignSpec& spec) {
  DesignSpec ref = spec;
  ref.dist = spec.dist.standardized();
  ref.kind = ParamKind::Location;
  return make_joint_static_quantizer(practical_thresholds(ref), spec.dist.family());
}

EstimatorState initial_state(EstimatorMode mode, double mu_hat0, double delta_hat0, double shrink_limit) {
  if (!(delta_hat0 > 0.0)) throw DomainError("initial scale estimate must be positive");
  if (!(shrink_limit >= 0.0 && shrink_limit < 1.0)) throw DomainError("shrink limit must lie in [0, 1)");
  return {mu_hat0, delta_hat0, 0, mode, 1e-9 * delta_hat0, shrink_limit};
}

EstimatorState step_location(const EstimatorState& state, const StaticQuantizerSpec& s, double y,
                             double known_delta) {
  EstimatorState next = state;
  next.k = state.k + 1;
  const std::size_t i = s.thresholds.quantize((y - state.mu_hat) / known_delta);
  next.mu_hat = state.mu_hat + known_delta * s.coefficients[i - 1] / (static_cast<double>(next.k) * s.fi_ref);
  return next;
}

EstimatorState step_scale(const EstimatorState& state, const StaticQuantizerSpec& s, double y, double known_mu) {
  EstimatorState next = state;
  next.k = state.k + 1;
  const std::size_t i = s.thresholds.quantize((y - known_mu) / state.delta_hat);
  const double d = state.delta_hat + state.delta_hat * s.coefficients[i - 1] /
                                         (static_cast<double>(next.k) * s.fi_ref);
  next.delta_hat = std::max({d, state.delta_floor, state.shrink_limit * state.delta_hat});
  return next;
}

EstimatorState step_joint(const EstimatorState& state, const JointStaticQuantizer& s, double y,
                          const JointOptions& opts) {
  EstimatorState next = state;
  next.k = state.k + 1;
  const double kk = static_cast<double>(next.k);
  const std::size_t i = s.thresholds.quantize((y - state.mu_hat) / state.delta_hat);
  next.mu_hat = state.mu_hat + state.delta_hat * s.eta_mu[i - 1] / (kk * s.fi_mu);
  if (opts.update_scale) {
    const double d = state.delta_hat + state.delta_hat * s.eta_delta[i - 1] / (kk * s.fi_delta);
    next.delta_hat = std::max({d, state.delta_floor, state.shrink_limit * state.delta_hat});
  }
  return next;
}

double expected_update(const Quantizer& normalized, const std::vector<double>& eta, const Family& family) {
  const CellProbabilities cp = cell_probs(normalized, reference(family));
  if (eta.size() != cp.probs.size()) throw DomainError("expected_update: coefficient count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) s += eta[i] * cp.probs[i];
  return s;
}

}  // namespace quantest
