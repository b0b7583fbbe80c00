#include "quantest/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quantest/design.hpp"
#include "quantest/error.hpp"
#include "quantest/io.hpp"
#include "quantest/parallel.hpp"
#include "quantest/svg.hpp"
#include "quantest/version.hpp"

namespace quantest {
namespace {

constexpr std::size_t kChunk = 256;

DesignSpec reference_spec(const SimConfig& cfg, ParamKind kind) {
  return DesignSpec{cfg.dist.standardized(), kind, cfg.n_bits};
}

Quantizer uniform_thresholds(const SimConfig& cfg, ParamKind kind) {
  return optimal_uniform_quantizer(reference_spec(cfg, kind)).quantizer;
}

// Everything a lane needs; built once per run and shared read-only.
struct Engine {
  SimConfig cfg;
  std::vector<std::size_t> grid;
  std::optional<StaticQuantizerSpec> single;
  std::optional<StaticQuantizerSpec> single_warm;
  std::optional<JointStaticQuantizer> joint;
  std::optional<JointStaticQuantizer> joint_warm;

  explicit Engine(const SimConfig& c) : cfg(c), grid(c.grid()) {
    const bool warm = cfg.warm_start_steps > 0;
    if (cfg.mode == EstimatorMode::Joint) {
      joint = make_joint_static_quantizer(reference_spec(cfg, ParamKind::Location));
      if (warm) joint_warm = make_joint_static_quantizer(uniform_thresholds(cfg, ParamKind::Location), cfg.dist.family());
    } else {
      const ParamKind kind = cfg.mode == EstimatorMode::LocationOnly ? ParamKind::Location : ParamKind::Scale;
      single = make_static_quantizer(reference_spec(cfg, kind));
      if (warm) single_warm = make_static_quantizer(uniform_thresholds(cfg, kind), cfg.dist.family(), kind);
    }
  }

  // Runs one realization, calling record(g, state) at each grid point.
  template <class Record>
  void run(std::size_t global_index, Record&& record) const {
    RandomStream rng = split_stream(cfg.seed, global_index);
    Sampler sampler(cfg.dist);
    EstimatorState st = initial_state(cfg.mode, cfg.initial_mu_hat, cfg.initial_delta_hat, cfg.scale_shrink_limit);
    const std::size_t warm_end = cfg.warm_start_steps;
    const double mu = cfg.dist.mu();
    const double delta = cfg.dist.delta();
    std::size_t g = 0;
    const std::size_t n = cfg.block_length;
    switch (cfg.mode) {
      case EstimatorMode::LocationOnly:
        for (std::size_t k = 1; k <= n; ++k) {
          const double y = sampler(rng);
          st = step_location(st, k <= warm_end ? *single_warm : *single, y, delta);
          if (g < grid.size() && k == grid[g]) record(g++, st);
        }
        break;
      case EstimatorMode::ScaleOnly:
        for (std::size_t k = 1; k <= n; ++k) {
          const double y = sampler(rng);
          st = step_scale(st, k <= warm_end ? *single_warm : *single, y, mu);
          if (g < grid.size() && k == grid[g]) record(g++, st);
        }
        break;
      case EstimatorMode::Joint:
        for (std::size_t k = 1; k <= n; ++k) {
          const double y = sampler(rng);
          st = step_joint(st, k <= warm_end ? *joint_warm : *joint, y);
          if (g < grid.size() && k == grid[g]) record(g++, st);
        }
        break;
    }
  }
};

bool tracks_mu(EstimatorMode m) { return m != EstimatorMode::ScaleOnly; }
bool tracks_delta(EstimatorMode m) { return m != EstimatorMode::LocationOnly; }

void finalize(SimResult& r) {
  const double n = static_cast<double>(r.realizations);
  r.mse_mu.clear();
  r.mse_delta.clear();
  for (double s : r.sum_sq_mu) r.mse_mu.push_back(s / n);
  for (double s : r.sum_sq_delta) r.mse_delta.push_back(s / n);
}

void attach_references(SimResult& r, const Engine& e) {
  const SimConfig& cfg = r.config;
  const double d2 = cfg.dist.delta() * cfg.dist.delta();
  double crb_mu_fi = 0.0;
  double crb_delta_fi = 0.0;
  if (cfg.mode == EstimatorMode::Joint) {
    r.fi_mu = e.joint->fi_mu / d2;
    r.fi_delta = e.joint->fi_delta / d2;
    crb_mu_fi = asymptotic_fi(DesignSpec{cfg.dist, ParamKind::Location, cfg.n_bits});
    crb_delta_fi = r.fi_delta;
  } else if (cfg.mode == EstimatorMode::LocationOnly) {
    r.fi_mu = e.single->fi_ref / d2;
    crb_mu_fi = asymptotic_fi(DesignSpec{cfg.dist, ParamKind::Location, cfg.n_bits});
  } else {
    r.fi_delta = e.single->fi_ref / d2;
    crb_delta_fi = asymptotic_fi(DesignSpec{cfg.dist, ParamKind::Scale, cfg.n_bits});
  }
  r.crb_mu.clear();
  r.crb_delta.clear();
  for (std::size_t k : r.k) {
    if (r.tracks_mu) r.crb_mu.push_back(1.0 / (static_cast<double>(k) * crb_mu_fi));
    if (r.tracks_delta) r.crb_delta.push_back(1.0 / (static_cast<double>(k) * crb_delta_fi));
  }
}

}  // namespace

void SimConfig::validate() const {
  if (realizations < 1) throw DomainError("realizations must be at least 1");
  if (block_length < 1) throw DomainError("block length must be at least 1");
  if (n_bits < 1 || n_bits > 16) throw DomainError("bits must lie in [1, 16]");
  if (!(initial_delta_hat > 0.0)) throw DomainError("initial scale estimate must be positive");
  if (!std::isfinite(initial_mu_hat)) throw DomainError("initial location estimate must be finite");
  if (mode != EstimatorMode::ScaleOnly && dist.tag() == FamilyTag::GGD && dist.beta() <= 1.0) {
    throw DomainError("GGD location design requires beta > 1");
  }
  if (mode == EstimatorMode::ScaleOnly && n_bits == 1) {
    throw DomainError("scale estimation with 1 bit: the centred threshold carries no information");
  }
  for (std::size_t i = 0; i < log_grid.size(); ++i) {
    if (log_grid[i] < 1 || log_grid[i] > block_length) throw DomainError("log grid points must lie in [1, block_length]");
    if (i > 0 && log_grid[i] <= log_grid[i - 1]) throw DomainError("log grid must be strictly increasing");
  }
}

std::vector<std::size_t> SimConfig::grid() const { return log_grid.empty() ? quantest::log_grid(block_length) : log_grid; }

SimConfig figure_config(EstimatorMode mode, const Distribution& truth, int n_bits) {
  SimConfig cfg;
  cfg.dist = truth;
  cfg.mode = mode;
  cfg.n_bits = n_bits;
  cfg.initial_mu_hat = truth.mu();
  cfg.initial_delta_hat = truth.delta();
  if (mode != EstimatorMode::ScaleOnly) cfg.initial_mu_hat = truth.mu() + 1.0;
  if (mode != EstimatorMode::LocationOnly) cfg.initial_delta_hat = 2.0 * truth.delta();
  return cfg;
}

std::vector<std::size_t> log_grid(std::size_t block_length, int per_decade) {
  if (block_length < 1) throw DomainError("log_grid: block length must be at least 1");
  if (per_decade < 1) throw DomainError("log_grid: need at least one point per decade");
  std::vector<std::size_t> out;
  for (int j = 0;; ++j) {
    const double v = std::pow(10.0, static_cast<double>(j) / per_decade);
    const auto k = static_cast<std::size_t>(std::llround(v));
    if (k >= block_length) break;
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  out.push_back(block_length);
  return out;
}

SimResult run_simulation(const SimConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Engine engine(cfg);
  const std::size_t g = engine.grid.size();
  const bool want_mu = tracks_mu(cfg.mode);
  const bool want_delta = tracks_delta(cfg.mode);
  const std::size_t chunks = (cfg.realizations + kChunk - 1) / kChunk;
  std::vector<double> chunk_mu(want_mu ? chunks * g : 0);
  std::vector<double> chunk_delta(want_delta ? chunks * g : 0);
  const double mu = cfg.dist.mu();
  const double delta = cfg.dist.delta();

  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    const std::size_t first = c * kChunk;
    const std::size_t count = std::min(kChunk, cfg.realizations - first);
    // Column-major per grid point so each point sums a contiguous run.
    std::vector<double> sq_mu(want_mu ? g * count : 0);
    std::vector<double> sq_delta(want_delta ? g * count : 0);
    for (std::size_t r = 0; r < count; ++r) {
      engine.run(cfg.realization_offset + first + r, [&](std::size_t gi, const EstimatorState& st) {
        if (want_mu) sq_mu[gi * count + r] = (st.mu_hat - mu) * (st.mu_hat - mu);
        if (want_delta) sq_delta[gi * count + r] = (st.delta_hat - delta) * (st.delta_hat - delta);
      });
    }
    for (std::size_t gi = 0; gi < g; ++gi) {
      if (want_mu) chunk_mu[gi * chunks + c] = pairwise_sum(sq_mu.data() + gi * count, count);
      if (want_delta) chunk_delta[gi * chunks + c] = pairwise_sum(sq_delta.data() + gi * count, count);
    }
  });

  SimResult r;
  r.config = cfg;
  r.k = engine.grid;
  r.tracks_mu = want_mu;
  r.tracks_delta = want_delta;
  r.realizations = cfg.realizations;
  for (std::size_t gi = 0; gi < g; ++gi) {
    if (want_mu) r.sum_sq_mu.push_back(pairwise_sum(chunk_mu.data() + gi * chunks, chunks));
    if (want_delta) r.sum_sq_delta.push_back(pairwise_sum(chunk_delta.data() + gi * chunks, chunks));
  }
  finalize(r);
  attach_references(r, engine);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SimResult merge(const SimResult& a, const SimResult& b) {
  if (a.k != b.k || a.tracks_mu != b.tracks_mu || a.tracks_delta != b.tracks_delta ||
      !(a.config.dist == b.config.dist) || a.config.mode != b.config.mode ||
      a.config.n_bits != b.config.n_bits || a.config.seed != b.config.seed) {
    throw DomainError("merge: results come from different experiments");
  }
  SimResult r = a;
  r.realizations = a.realizations + b.realizations;
  r.config.realizations = r.realizations;
  r.config.realization_offset = std::min(a.config.realization_offset, b.config.realization_offset);
  for (std::size_t i = 0; i < r.sum_sq_mu.size(); ++i) r.sum_sq_mu[i] = a.sum_sq_mu[i] + b.sum_sq_mu[i];
  for (std::size_t i = 0; i < r.sum_sq_delta.size(); ++i) r.sum_sq_delta[i] = a.sum_sq_delta[i] + b.sum_sq_delta[i];
  r.wall_seconds = a.wall_seconds + b.wall_seconds;
  finalize(r);
  return r;
}

void write_csv(std::ostream& os, const SimResult& r) {
  os << "k,mse_mu,mse_delta,crb_mu,crb_delta\n";
  for (std::size_t i = 0; i < r.k.size(); ++i) {
    os << r.k[i] << ',' << (r.tracks_mu ? format_real(r.mse_mu[i]) : "") << ','
       << (r.tracks_delta ? format_real(r.mse_delta[i]) : "") << ','
       << (r.tracks_mu ? format_real(r.crb_mu[i]) : "") << ','
       << (r.tracks_delta ? format_real(r.crb_delta[i]) : "") << '\n';
  }
}

std::string to_csv(const SimResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

std::string to_svg(const SimResult& r) {
  std::vector<double> k(r.k.begin(), r.k.end());
  std::vector<PlotSeries> s;
  if (r.tracks_mu) {
    s.push_back({"MSE mu", k, r.mse_mu, "#1f77b4", false});
    s.push_back({"CRB mu", k, r.crb_mu, "#1f77b4", true});
  }
  if (r.tracks_delta) {
    s.push_back({"MSE delta", k, r.mse_delta, "#d62728", false});
    s.push_back({"CRB delta", k, r.crb_delta, "#d62728", true});
  }
  const std::string title = to_string(r.config.mode) + " estimation, " + describe(r.config.dist) + ", " +
                            std::to_string(r.config.n_bits) + " bits";
  return render_loglog_svg(s, title, "k", "MSE");
}

nlohmann::json manifest(const SimResult& r) {
  nlohmann::json j;
  j["version"] = std::string(version_string());
  j["config"] = r.config;
  j["realizations"] = r.realizations;
  if (r.tracks_mu) j["fi_mu"] = r.fi_mu;
  if (r.tracks_delta) j["fi_delta"] = r.fi_delta;
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

void write_trajectories_csv(std::ostream& os, const SimConfig& cfg, std::size_t count) {
  cfg.validate();
  const Engine engine(cfg);
  os << "realization_id,k,mu_hat,delta_hat\n";
  for (std::size_t r = 0; r < std::min(count, cfg.realizations); ++r) {
    const std::size_t id = cfg.realization_offset + r;
    engine.run(id, [&](std::size_t gi, const EstimatorState& st) {
      os << id << ',' << engine.grid[gi] << ',' << format_real(st.mu_hat) << ',' << format_real(st.delta_hat)
         << '\n';
    });
  }
}

void to_json(nlohmann::json& j, const SimConfig& c) {
  j = nlohmann::json{{"dist", c.dist},
                     {"mode", to_string(c.mode)},
                     {"bits", c.n_bits},
                     {"realizations", c.realizations},
                     {"block_length", c.block_length},
                     {"initial_mu_hat", c.initial_mu_hat},
                     {"initial_delta_hat", c.initial_delta_hat},
                     {"seed", c.seed},
                     {"realization_offset", c.realization_offset},
                     {"warm_start_steps", c.warm_start_steps},
                     {"scale_shrink_limit", c.scale_shrink_limit}};
  if (!c.log_grid.empty()) j["log_grid"] = c.log_grid;
}

void from_json(const nlohmann::json& j, SimConfig& c) {
  SimConfig d;
  d.dist = j.at("dist").get<Distribution>();
  d.mode = parse_estimator_mode(j.at("mode").get<std::string>());
  d.n_bits = j.value("bits", d.n_bits);
  d.realizations = j.value("realizations", d.realizations);
  d.block_length = j.value("block_length", d.block_length);
  d.initial_mu_hat = j.value("initial_mu_hat", d.initial_mu_hat);
  d.initial_delta_hat = j.value("initial_delta_hat", d.initial_delta_hat);
  d.seed = j.value("seed", d.seed);
  d.realization_offset = j.value("realization_offset", d.realization_offset);
  d.warm_start_steps = j.value("warm_start_steps", d.warm_start_steps);
  d.scale_shrink_limit = j.value("scale_shrink_limit", d.scale_shrink_limit);
  if (j.contains("log_grid")) d.log_grid = j.at("log_grid").get<std::vector<std::size_t>>();
  c = std::move(d);
}

}  // namespace quantest
