#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "quantest/adaptive.hpp"
#include "quantest/distributions.hpp"

namespace quantest {

struct SimConfig {
  Distribution dist;  // truth
  EstimatorMode mode = EstimatorMode::LocationOnly;
  int n_bits = 4;
  std::size_t realizations = 1000;
  std::size_t block_length = 50000;
  double initial_mu_hat = 1.0;
  double initial_delta_hat = 1.0;
  std::uint64_t seed = 1;
  /// k values at which squared errors are recorded; empty means
  /// log_grid(block_length).
  std::vector<std::size_t> log_grid;
  /// Global index of the first realization; realization r draws from
  /// split_stream(seed, realization_offset + r).
  std::size_t realization_offset = 0;
  /// 0 means one worker per hardware thread.
  unsigned threads = 0;
  /// When positive, uniform thresholds drive the first warm_start_steps
  /// updates before switching to the practical design.
  std::size_t warm_start_steps = 0;
  /// Passed to initial_state(): per-step lower bound on
  /// delta_hat_k / delta_hat_{k-1}. Keeps heavy-tailed scale runs from
  /// collapsing onto the floor in the first few steps; 0 disables it.
  double scale_shrink_limit = 0.1;

  void validate() const;
  std::vector<std::size_t> grid() const;
};

/// Initial estimates used for the figures: location starts one unit above
/// the truth with known scale; scale starts at twice the truth; joint starts
/// at (mu + 1, 2 delta).
SimConfig figure_config(EstimatorMode mode, const Distribution& truth, int n_bits);

struct SimResult {
  SimConfig config;
  std::vector<std::size_t> k;
  bool tracks_mu = false;
  bool tracks_delta = false;
  std::vector<double> mse_mu;
  std::vector<double> mse_delta;
  std::vector<double> crb_mu;
  std::vector<double> crb_delta;
  /// Exact quantized FI of the static design(s), at the true scale.
  double fi_mu = 0.0;
  double fi_delta = 0.0;
  std::size_t realizations = 0;
  double wall_seconds = 0.0;
  // Raw sums of squared errors, kept so runs can be merged exactly.
  std::vector<double> sum_sq_mu;
  std::vector<double> sum_sq_delta;
};

/// About `per_decade` log-spaced integers from 1 to block_length, always
/// ending at block_length.
std::vector<std::size_t> log_grid(std::size_t block_length, int per_decade = 32);

SimResult run_simulation(const SimConfig& cfg);

/// Combines runs over disjoint realization ranges of the same experiment.
SimResult merge(const SimResult& a, const SimResult& b);

/// Columns k, mse_mu, mse_delta, crb_mu, crb_delta; untracked columns empty.
void write_csv(std::ostream& os, const SimResult& r);
std::string to_csv(const SimResult& r);
std::string to_svg(const SimResult& r);
/// Config echo, library version, FI references and wall time.
nlohmann::json manifest(const SimResult& r);

/// realization_id, k, mu_hat, delta_hat on the recording grid for the first
/// `count` realizations of `cfg`.
void write_trajectories_csv(std::ostream& os, const SimConfig& cfg, std::size_t count);

void to_json(nlohmann::json& j, const SimConfig& cfg);
void from_json(const nlohmann::json& j, SimConfig& cfg);

}  // namespace quantest
