#include "quantest/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "quantest/error.hpp"
#include "quantest/io.hpp"

namespace quantest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateProb = 1e-15;

void validate_thresholds(const std::vector<double>& t) {
  if (t.empty()) throw DomainError("quantizer needs at least one interior threshold");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) throw DomainError("quantizer thresholds must be finite");
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw DomainError("quantizer thresholds must be strictly increasing");
    }
  }
}

// Density-weighted edge term of dP/dtheta; zero at infinite edges.
double edge_term(const Distribution& d, ParamKind kind, double tau) {
  if (std::isinf(tau)) return 0.0;
  const double f = d.pdf(tau);
  if (kind == ParamKind::Location) return f;
  return (tau - d.mu()) / d.delta() * f;
}

}  // namespace

Quantizer::Quantizer(std::vector<double> interior_thresholds) : tau_(std::move(interior_thresholds)) {
  validate_thresholds(tau_);
}

double Quantizer::threshold(std::size_t i) const {
  if (i == 0) return -kInf;
  if (i == intervals()) return kInf;
  if (i > intervals()) throw DomainError("threshold index out of range");
  return tau_[i - 1];
}

std::size_t Quantizer::quantize(double y) const {
  if (std::isnan(y)) throw DomainError("quantize: NaN input");
  // Branch-free upper_bound; the adaptive loops feed it random inputs.
  const double* base = tau_.data();
  std::size_t n = tau_.size();
  while (n > 1) {
    const std::size_t half = n / 2;
    base = base[half - 1] <= y ? base + half : base;
    n -= half;
  }
  return static_cast<std::size_t>(base - tau_.data()) + (*base <= y ? 1 : 0) + 1;
}

Quantizer Quantizer::affine(double shift, double scale) const {
  if (!(scale > 0.0)) throw DomainError("affine: scale must be positive");
  std::vector<double> t(tau_);
  for (double& v : t) v = shift + scale * v;
  return Quantizer(std::move(t));
}

Quantizer Quantizer::refined(double t) const {
  std::vector<double> v(tau_);
  v.insert(std::upper_bound(v.begin(), v.end(), t), t);
  return Quantizer(std::move(v));
}

CellProbabilities cell_probs(const Quantizer& q, const Distribution& d) {
  const std::size_t n = q.intervals();
  CellProbabilities out;
  out.probs.resize(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double lo = q.threshold(i - 1);
    const double hi = q.threshold(i);
    double p = 0.0;
    // Difference the tail that is small on the side the cell sits on.
    if (lo >= d.mu()) {
      p = d.survival(lo) - d.survival(hi);
    } else if (hi <= d.mu()) {
      p = d.cdf(hi) - d.cdf(lo);
    } else {
      p = 1.0 - d.cdf(lo) - d.survival(hi);
    }
    p = std::max(p, 0.0);
    out.probs[i - 1] = p;
    if (p < kDegenerateProb) out.degenerate = true;
  }
  return out;
}

std::vector<double> cell_prob_derivatives(const Quantizer& q, const Distribution& d, ParamKind kind) {
  const std::size_t n = q.intervals();
  std::vector<double> edge(n + 1);
  for (std::size_t i = 0; i <= n; ++i) edge[i] = edge_term(d, kind, q.threshold(i));
  std::vector<double> dp(n);
  for (std::size_t i = 0; i < n; ++i) dp[i] = edge[i] - edge[i + 1];
  return dp;
}

QuantizedFi quantized_fi_report(const Quantizer& q, const Distribution& d, ParamKind kind) {
  const CellProbabilities cp = cell_probs(q, d);
  const std::vector<double> dp = cell_prob_derivatives(q, d, kind);
  QuantizedFi out;
  out.degenerate = cp.degenerate;
  for (std::size_t i = 0; i < dp.size(); ++i) {
    if (cp.probs[i] <= 0.0) {
      ++out.zero_cells;
      continue;
    }
    out.value += dp[i] * dp[i] / cp.probs[i];
  }
  return out;
}

double quantized_fi(const Quantizer& q, const Distribution& d, ParamKind kind) {
  return quantized_fi_report(q, d, kind).value;
}

std::vector<double> score_coefficients(const Quantizer& q, const Distribution& d, ParamKind kind) {
  const CellProbabilities cp = cell_probs(q, d);
  std::vector<double> eta = cell_prob_derivatives(q, d, kind);
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = cp.probs[i] > 0.0 ? eta[i] / cp.probs[i] : 0.0;
  return eta;
}

void write_cell_table_csv(std::ostream& os, const Quantizer& q, const Distribution& d, ParamKind kind) {
  const CellProbabilities cp = cell_probs(q, d);
  const std::vector<double> eta = score_coefficients(q, d, kind);
  os << "i,tau_i,P_i,eta_i\n";
  for (std::size_t i = 1; i <= q.intervals(); ++i) {
    os << i << ',' << format_real(q.threshold(i)) << ',' << format_real(cp.probs[i - 1]) << ','
       << format_real(eta[i - 1]) << '\n';
  }
}

void to_json(nlohmann::json& j, const Quantizer& q) { j = q.thresholds(); }

Quantizer quantizer_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DomainError("quantizer JSON must be an array of thresholds");
  return Quantizer(j.get<std::vector<double>>());
}

}  // namespace quantest
