#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "quantest/adaptive.hpp"
#include "quantest/error.hpp"
#include "quantest/sim.hpp"

using namespace quantest;

namespace {

SimConfig small(EstimatorMode mode, const Distribution& d, std::size_t reps = 64, std::size_t block = 3000) {
  SimConfig c = figure_config(mode, d, 4);
  c.realizations = reps;
  c.block_length = block;
  c.seed = 77;
  c.threads = 1;
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(LogGrid, ShapeAndEnds) {
  const auto g = log_grid(50000);
  ASSERT_FALSE(g.empty());
  EXPECT_EQ(g.front(), 1u);
  EXPECT_EQ(g.back(), 50000u);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  EXPECT_LE(g.size(), 32u * 5u + 1u);
  EXPECT_GE(g.size(), 100u);
  EXPECT_EQ(log_grid(1), std::vector<std::size_t>{1});
  EXPECT_EQ(log_grid(10, 1), (std::vector<std::size_t>{1, 10}));
  EXPECT_THROW(log_grid(0), DomainError);
}

TEST(SimConfig, Validation) {
  SimConfig c = small(EstimatorMode::LocationOnly, Distribution::ggd(2.0));
  EXPECT_NO_THROW(c.validate());
  auto bad = [&](auto mutate) {
    SimConfig b = c;
    mutate(b);
    EXPECT_THROW(b.validate(), DomainError);
    EXPECT_THROW(run_simulation(b), DomainError);
  };
  bad([](SimConfig& b) { b.realizations = 0; });
  bad([](SimConfig& b) { b.block_length = 0; });
  bad([](SimConfig& b) { b.n_bits = 0; });
  bad([](SimConfig& b) { b.initial_delta_hat = 0.0; });
  bad([](SimConfig& b) { b.initial_mu_hat = std::nan(""); });
  bad([](SimConfig& b) { b.dist = Distribution::ggd(1.0); });
  bad([](SimConfig& b) { b.log_grid = {1, 5, 5}; });
  bad([](SimConfig& b) { b.log_grid = {1, 5000}; });
  bad([](SimConfig& b) {
    b.mode = EstimatorMode::ScaleOnly;
    b.n_bits = 1;
  });
}

TEST(SimConfig, FigureDefaults) {
  const Distribution d = Distribution::student(1.0, 2.0, 3.0);
  const auto loc = figure_config(EstimatorMode::LocationOnly, d, 5);
  EXPECT_EQ(loc.initial_mu_hat, 3.0);
  EXPECT_EQ(loc.initial_delta_hat, 3.0);
  EXPECT_EQ(loc.n_bits, 5);
  const auto sc = figure_config(EstimatorMode::ScaleOnly, d, 5);
  EXPECT_EQ(sc.initial_mu_hat, 2.0);
  EXPECT_EQ(sc.initial_delta_hat, 6.0);
  const auto joint = figure_config(EstimatorMode::Joint, d, 5);
  EXPECT_EQ(joint.initial_mu_hat, 3.0);
  EXPECT_EQ(joint.initial_delta_hat, 6.0);
}

TEST(SimConfig, JsonRoundTrip) {
  SimConfig c = small(EstimatorMode::Joint, Distribution::student(3.0, 1.0, 2.0));
  c.log_grid = {1, 10, 100, 3000};
  c.warm_start_steps = 50;
  c.realization_offset = 9;
  c.scale_shrink_limit = 0.25;
  c.seed = 0xFFFFFFFFFFFFFFFFull;
  const nlohmann::json j = c;
  const SimConfig back = nlohmann::json::parse(j.dump()).get<SimConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.log_grid, c.log_grid);
  EXPECT_THROW(nlohmann::json::parse(R"({"dist":{"family":"ggd","beta":2,"mu":0,"delta":1},"mode":"both"})")
                   .get<SimConfig>(),
               DomainError);
}

TEST(Simulation, SameSeedSameBytes) {
  for (EstimatorMode m : {EstimatorMode::LocationOnly, EstimatorMode::ScaleOnly, EstimatorMode::Joint}) {
    const SimConfig c = small(m, Distribution::student(1.0));
    EXPECT_EQ(to_csv(run_simulation(c)), to_csv(run_simulation(c))) << to_string(m);
  }
}

TEST(Simulation, ThreadCountDoesNotChangeResults) {
  SimConfig c = small(EstimatorMode::Joint, Distribution::ggd(2.0), 700, 500);
  const std::string one = to_csv(run_simulation(c));
  c.threads = 3;
  EXPECT_EQ(to_csv(run_simulation(c)), one);
}

TEST(Simulation, SeedMatters) {
  SimConfig c = small(EstimatorMode::LocationOnly, Distribution::ggd(2.0));
  const auto a = run_simulation(c);
  c.seed = 78;
  const auto b = run_simulation(c);
  EXPECT_NE(a.mse_mu.back(), b.mse_mu.back());
}

TEST(Simulation, MergeOfSplitRunsMatchesFullRun) {
  for (EstimatorMode m : {EstimatorMode::LocationOnly, EstimatorMode::Joint}) {
    SimConfig full = small(m, Distribution::student(1.0), 600, 2000);
    SimConfig a = full;
    a.realizations = 350;
    SimConfig b = full;
    b.realizations = 250;
    b.realization_offset = 350;
    const auto whole = run_simulation(full);
    const auto merged = merge(run_simulation(a), run_simulation(b));
    EXPECT_EQ(merged.realizations, 600u);
    ASSERT_EQ(merged.mse_mu.size(), whole.mse_mu.size());
    for (std::size_t i = 0; i < whole.mse_mu.size(); ++i) {
      EXPECT_NEAR(merged.mse_mu[i], whole.mse_mu[i], 1e-12 * whole.mse_mu[i]) << i;
    }
    for (std::size_t i = 0; i < whole.mse_delta.size(); ++i) {
      EXPECT_NEAR(merged.mse_delta[i], whole.mse_delta[i], 1e-12 * whole.mse_delta[i]) << i;
    }
  }
  SimConfig x = small(EstimatorMode::LocationOnly, Distribution::ggd(2.0));
  SimConfig y = x;
  y.seed = 5;
  EXPECT_THROW(merge(run_simulation(x), run_simulation(y)), DomainError);
}

TEST(Simulation, SingleStepMatchesHandComputation) {
  const Distribution d = Distribution::ggd(2.0, 0.5, 2.0);
  SimConfig c = figure_config(EstimatorMode::LocationOnly, d, 3);
  c.block_length = 1;
  c.realizations = 5;
  c.seed = 11;
  const auto r = run_simulation(c);
  ASSERT_EQ(r.k, std::vector<std::size_t>{1});
  const auto s = make_static_quantizer({d, ParamKind::Location, 3});
  double sum = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    RandomStream rng = split_stream(11, i);
    Sampler draw(d);
    const auto st = step_location(initial_state(EstimatorMode::LocationOnly, 1.5, 2.0), s, draw(rng), 2.0);
    sum += (st.mu_hat - 0.5) * (st.mu_hat - 0.5);
  }
  EXPECT_NEAR(r.mse_mu[0], sum / 5.0, 1e-15);
  EXPECT_EQ(to_csv(r), to_csv(run_simulation(c)));
}

TEST(Simulation, TrajectoriesAgreeWithAggregate) {
  SimConfig c = small(EstimatorMode::Joint, Distribution::ggd(2.0), 3, 1000);
  std::ostringstream os;
  write_trajectories_csv(os, c, 3);
  const std::string text = os.str();
  const std::size_t g = c.grid().size();
  EXPECT_EQ(count_lines(text), 1 + 3 * g);
  EXPECT_EQ(text.substr(0, text.find('\n')), "realization_id,k,mu_hat,delta_hat");
  // last row of realization 0 at k = block_length
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  double sq = 0.0;
  for (std::size_t i = 0; i < 3 * g; ++i) {
    std::getline(is, line);
    std::istringstream fields(line);
    std::string id, k, mu, delta;
    std::getline(fields, id, ',');
    std::getline(fields, k, ',');
    std::getline(fields, mu, ',');
    std::getline(fields, delta, ',');
    if (k == "1000") sq += (std::stod(mu) - 0.0) * (std::stod(mu) - 0.0);
  }
  const auto r = run_simulation(c);
  EXPECT_NEAR(r.mse_mu.back(), sq / 3.0, 1e-14 * std::max(1.0, sq));
}

TEST(Simulation, CsvColumnsAndReferenceCurves) {
  const auto r = run_simulation(small(EstimatorMode::ScaleOnly, Distribution::ggd(2.0)));
  const std::string csv = to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,mse_mu,mse_delta,crb_mu,crb_delta");
  EXPECT_NE(csv.find("\n1,,"), std::string::npos);
  EXPECT_EQ(count_lines(csv), 1 + r.k.size());
  EXPECT_FALSE(r.tracks_mu);
  EXPECT_TRUE(r.tracks_delta);
  for (double m : r.mse_delta) EXPECT_GE(m, 0.0);
  for (std::size_t i = 1; i < r.crb_delta.size(); ++i) EXPECT_LT(r.crb_delta[i], r.crb_delta[i - 1]);
  EXPECT_NEAR(r.crb_delta.back() * 3000.0 * asymptotic_fi({Distribution::ggd(2.0), ParamKind::Scale, 4}), 1.0, 1e-12);
  EXPECT_NEAR(r.fi_delta, make_static_quantizer({Distribution::ggd(2.0), ParamKind::Scale, 4}).fi_ref, 1e-15);
}

TEST(Simulation, FiReferencesUseTrueScale) {
  const auto r = run_simulation(small(EstimatorMode::Joint, Distribution::student(1.0, 0.0, 2.0), 4, 100));
  const auto j = make_joint_static_quantizer({Distribution::student(1.0), ParamKind::Location, 4});
  EXPECT_NEAR(r.fi_mu, j.fi_mu / 4.0, 1e-15);
  EXPECT_NEAR(r.fi_delta, j.fi_delta / 4.0, 1e-15);
}

TEST(Simulation, ManifestEchoesConfig) {
  const SimConfig c = small(EstimatorMode::LocationOnly, Distribution::ggd(2.0));
  const auto r = run_simulation(c);
  const nlohmann::json m = manifest(r);
  EXPECT_EQ(m.at("config"), nlohmann::json(c));
  EXPECT_EQ(m.at("realizations"), 64);
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(m.contains("wall_seconds"));
  EXPECT_FALSE(m.contains("fi_delta"));
  const SimConfig back = m.at("config").get<SimConfig>();
  EXPECT_EQ(to_csv(run_simulation(back)), to_csv(r));
}

TEST(Simulation, SvgContainsCurves) {
  const std::string svg = to_svg(run_simulation(small(EstimatorMode::Joint, Distribution::ggd(2.0), 8, 200)));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("MSE mu"), std::string::npos);
  EXPECT_NE(svg.find("CRB delta"), std::string::npos);
}

TEST(Simulation, WarmStartChangesEarlyThresholds) {
  SimConfig c = small(EstimatorMode::LocationOnly, Distribution::student(1.0), 32, 400);
  const auto plain = run_simulation(c);
  c.warm_start_steps = 200;
  const auto warm = run_simulation(c);
  EXPECT_NE(plain.mse_mu.back(), warm.mse_mu.back());
  EXPECT_EQ(to_csv(warm), to_csv(run_simulation(c)));
}

TEST(Simulation, MseDoesNotBeatTheBoundAtLargeK) {
  struct Case {
    EstimatorMode mode;
    Distribution dist;
  };
  for (const Case& cs : {Case{EstimatorMode::LocationOnly, Distribution::ggd(2.0)},
                         Case{EstimatorMode::ScaleOnly, Distribution::student(1.0)}}) {
    SimConfig c = small(cs.mode, cs.dist, 2000, 20000);
    c.threads = 0;
    const auto r = run_simulation(c);
    const auto& mse = cs.mode == EstimatorMode::LocationOnly ? r.mse_mu : r.mse_delta;
    const auto& crb = cs.mode == EstimatorMode::LocationOnly ? r.crb_mu : r.crb_delta;
    for (std::size_t i = 0; i < r.k.size(); ++i) {
      if (r.k[i] >= 10000) EXPECT_GE(mse[i], 0.9 * crb[i]) << to_string(cs.mode) << " k=" << r.k[i];
    }
  }
}
