#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "quantest/io.hpp"
#include "quantest/version.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::initializer_list<std::string> args) {
  std::vector<std::string> a{"quantest"};
  a.insert(a.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : a) argv.push_back(s.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = quantest::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(QUANTEST_TEST_TMP) / ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string read(const std::string& p) { return quantest::read_text_file(p); }
  static json read_json(const std::string& p) { return json::parse(read(p)); }
  static std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DesignGaussianLocation) {
  const auto r = cli({"design", "--family", "ggd", "--beta", "2", "--param", "location", "--bits", "4", "--out",
                      path("d.json"), "--csv", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 1u);
  const json j = read_json(path("d.json"));
  EXPECT_EQ(j.at("thresholds").size(), 15u);
  EXPECT_NEAR(j.at("fi_exact").get<double>(), 1.98038526, 1e-8);
  EXPECT_NEAR(j.at("fi_asymptotic").get<double>(), 1.97874454, 1e-8);
  EXPECT_EQ(j.at("method"), "closed");
  EXPECT_EQ(j.at("spec").at("bits"), 4);
  const std::string csv = read(path("d.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "i,tau_i,P_i,eta_i");
  EXPECT_EQ(lines(csv), 17u);
}

TEST_F(Cli, DesignCauchyScale) {
  const auto r = cli({"design", "--family", "std", "--beta", "1", "--param", "scale", "--bits", "3", "--out", path("d.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(read_json(path("d.json")).at("fi_exact").get<double>(), 0.47893785, 1e-8);
}

TEST_F(Cli, DesignDomainGuard) {
  const auto r = cli({"design", "--family", "ggd", "--beta", "1", "--param", "location", "--bits", "2", "--out", path("d.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(lines(r.err), 1u);
  EXPECT_NE(r.err.find("beta > 1"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("d.json")));
}

TEST_F(Cli, DesignMethods) {
  struct M {
    const char* method;
    double fi;
    double tol;
  };
  for (const M& m : {M{"exhaustive", 1.93090199, 1e-4}, M{"uniform", 1.92837814, 1e-7}, M{"numeric", 1.92740111, 1e-7},
                     M{"closed", 1.92740111, 1e-8}}) {
    const auto r = cli({"design", "--bits", "3", "--method", m.method, "--out", path("d.json")});
    ASSERT_EQ(r.code, 0) << m.method << ' ' << r.err;
    EXPECT_NEAR(read_json(path("d.json")).at("fi_exact").get<double>(), m.fi, m.tol) << m.method;
  }
  const auto sym = cli({"design", "--family", "std", "--beta", "1", "--bits", "2", "--method", "exhaustive", "--out",
                        path("s.json")});
  const auto asym = cli({"design", "--family", "std", "--beta", "1", "--bits", "2", "--method", "exhaustive", "--asymmetric", "--out",
                         path("a.json")});
  ASSERT_EQ(sym.code, 0);
  ASSERT_EQ(asym.code, 0);
  EXPECT_NEAR(read_json(path("s.json")).at("fi_exact").get<double>(), 0.43433896, 1e-6);
  EXPECT_GT(read_json(path("a.json")).at("fi_exact").get<double>(), 0.449);
  EXPECT_EQ(cli({"design", "--method", "magic", "--out", path("x.json")}).code, 2);
  EXPECT_EQ(cli({"design", "--bits", "4", "--method", "exhaustive", "--out", path("x.json")}).code, 2);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  quantest::write_text_file(path("cfg.json"),
                            R"({"dist":{"family":"std","beta":1,"mu":0,"delta":1},"param":"scale","bits":2})");
  auto r = cli({"design", "--config", path("cfg.json"), "--out", path("a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_json(path("a.json")).at("spec").at("param"), "scale");
  r = cli({"design", "--config", path("cfg.json"), "--bits", "3", "--out", path("b.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(read_json(path("b.json")).at("fi_exact").get<double>(), 0.47893785, 1e-8);
  quantest::write_text_file(path("bad.json"), "{not json");
  EXPECT_EQ(cli({"design", "--config", path("bad.json"), "--out", path("c.json")}).code, 2);
  EXPECT_EQ(cli({"design", "--config", path("missing.json"), "--out", path("c.json")}).code, 2);
}

TEST_F(Cli, FiFromFlagsAndFiles) {
  auto r = cli({"fi", "--thresholds=-1,0,1", "--out", path("f.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const double a = read_json(path("f.json")).at("fi_exact").get<double>();
  ASSERT_EQ(cli({"design", "--bits", "2", "--out", path("d.json")}).code, 0);
  r = cli({"fi", "--quantizer", path("d.json"), "--out", path("g.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(read_json(path("g.json")).at("fi_exact").get<double>(), 1.75128300, 1e-8);
  quantest::write_text_file(path("q.json"), "[-1, 0, 1]");
  r = cli({"fi", "--quantizer", path("q.json"), "--out", path("h.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_json(path("h.json")).at("fi_exact").get<double>(), a);
  EXPECT_EQ(cli({"fi", "--thresholds=1,0", "--out", path("x.json")}).code, 2);
  EXPECT_EQ(cli({"fi", "--out", path("x.json")}).code, 2);
}

TEST_F(Cli, TableWritesCsvAndSummary) {
  const auto r = cli({"table", "--which", "2", "--out", path("t.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 1u);
  EXPECT_NE(r.out.find("max_abs_delta"), std::string::npos);
  const std::string csv = read(path("t.csv"));
  EXPECT_EQ(lines(csv), 17u);
  EXPECT_NE(csv.find("delta_vs_reference_practical"), std::string::npos);
  EXPECT_EQ(cli({"table", "--which", "3", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(cli({"table", "--out", path("x.csv")}).code, 2);
}

TEST_F(Cli, SimulateIsDeterministic) {
  const std::initializer_list<std::string> base{"simulate", "--mode", "location", "--family", "ggd", "--beta", "2",
                                                "--bits", "4", "--realizations", "40", "--block", "2000"};
  auto run_to = [&](const std::string& out, std::initializer_list<std::string> extra) {
    std::vector<std::string> v(base);
    v.insert(v.end(), {"--out", out});
    v.insert(v.end(), extra);
    if (std::find(v.begin(), v.end(), "--seed") == v.end()) v.insert(v.end(), {"--seed", "7"});
    std::vector<const char*> argv{"quantest"};
    for (const auto& s : v) argv.push_back(s.c_str());
    std::ostringstream o, e;
    return quantest::cli::run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  };
  ASSERT_EQ(run_to(path("a.csv"), {"--svg", path("a.svg"), "--trajectories", "2"}), 0);
  ASSERT_EQ(run_to(path("b.csv"), {"--threads", "2"}), 0);
  EXPECT_EQ(read(path("a.csv")), read(path("b.csv")));
  EXPECT_TRUE(fs::exists(path("a.csv.json")));
  EXPECT_EQ(read(path("a.svg")).rfind("<svg", 0), 0u);
  EXPECT_TRUE(fs::exists(path("a.csv.traj.csv")));
  ASSERT_EQ(run_to(path("c.csv"), {"--seed", "8"}), 0);
  EXPECT_NE(read(path("a.csv")), read(path("c.csv")));

  // the manifest is itself a config that reproduces the run
  const json man = read_json(path("a.csv.json"));
  EXPECT_EQ(man.at("config").at("seed"), 7);
  EXPECT_EQ(man.at("version"), std::string(quantest::version_string()));
  const auto r = cli({"simulate", "--config", path("a.csv.json"), "--out", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read(path("d.csv")), read(path("a.csv")));
  quantest::write_text_file(path("cfg.json"), man.at("config").dump());
  ASSERT_EQ(cli({"simulate", "--config", path("cfg.json"), "--out", path("e.csv")}).code, 0);
  EXPECT_EQ(read(path("e.csv")), read(path("a.csv")));
}

TEST_F(Cli, SimulateSummaryAndDefaults) {
  const auto r = cli({"simulate", "--mode", "joint", "--family", "std", "--beta", "1", "--realizations", "8", "--block",
                      "500", "--figure-defaults", "--out", path("s.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 1u);
  EXPECT_NE(r.out.find("k*mse_delta="), std::string::npos);
  const json cfg = read_json(path("s.csv.json")).at("config");
  EXPECT_EQ(cfg.at("initial_mu_hat"), 1.0);
  EXPECT_EQ(cfg.at("initial_delta_hat"), 2.0);
  const std::string csv = read(path("s.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,mse_mu,mse_delta,crb_mu,crb_delta");
}

TEST_F(Cli, SimulateThreadsFromEnvironment) {
  ::setenv("QUANTEST_THREADS", "2", 1);
  auto r = cli({"simulate", "--realizations", "300", "--block", "100", "--out", path("a.csv")});
  ::setenv("QUANTEST_THREADS", "1", 1);
  auto s = cli({"simulate", "--realizations", "300", "--block", "100", "--out", path("b.csv")});
  ::unsetenv("QUANTEST_THREADS");
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(read(path("a.csv")), read(path("b.csv")));
}

TEST_F(Cli, SimulateRejectsBadConfig) {
  EXPECT_EQ(cli({"simulate", "--realizations", "0", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(cli({"simulate", "--mode", "scale", "--bits", "1", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(cli({"simulate", "--delta0", "-1", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(cli({"simulate", "--mode", "sideways", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(cli({"simulate", "--shrink-limit", "1.5", "--out", path("x.csv")}).code, 2);
}

TEST_F(Cli, Coeffs) {
  auto r = cli({"coeffs", "--family", "std", "--beta", "1", "--param", "location", "--bits", "2", "--out", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = read(path("c.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "i,tau_i,P_i,eta_i");
  EXPECT_EQ(lines(csv), 5u);
  r = cli({"coeffs", "--joint", "--bits", "3", "--out", path("j.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  csv = read(path("j.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "i,tau_i,eta_mu_i,eta_delta_i");
  EXPECT_EQ(lines(csv), 9u);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"design", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"design", "--bits", "two"}).code, 2);
  EXPECT_EQ(cli({"design", "--family", "normal"}).code, 2);
  // unwritable output path
  quantest::write_text_file(path("file"), "x");
  EXPECT_EQ(cli({"design", "--out", path("file") + "/d.json"}).code, 2);
}

TEST_F(Cli, VersionAndHelp) {
  auto r = cli({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(quantest::version_string()), std::string::npos);
  r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"design", "fi", "table", "simulate", "coeffs"}) EXPECT_NE(r.out.find(sub), std::string::npos);
  struct Sub {
    const char* name;
    std::vector<std::string> flags;
  };
  const std::vector<std::string> dist{"--family", "--beta", "--mu", "--delta"};
  const Sub subs[] = {
      {"design", {"--param", "--bits", "--config", "--method", "--asymmetric", "--out", "--csv"}},
      {"fi", {"--param", "--thresholds", "--quantizer", "--config", "--out", "--csv"}},
      {"table", {"--which", "--out"}},
      {"simulate",
       {"--mode", "--bits", "--realizations", "--block", "--mu0", "--delta0", "--seed", "--warm-start",
        "--shrink-limit", "--threads", "--figure-defaults", "--config", "--out", "--svg", "--manifest",
        "--trajectories", "--trajectories-out"}},
      {"coeffs", {"--joint", "--param", "--bits", "--out"}}};
  for (const Sub& s : subs) {
    r = cli({s.name, "--help"});
    EXPECT_EQ(r.code, 0) << s.name;
    std::vector<std::string> all = s.flags;
    if (std::string(s.name) != "table") all.insert(all.end(), dist.begin(), dist.end());
    for (const auto& f : all) EXPECT_NE(r.out.find(f), std::string::npos) << s.name << ' ' << f;
  }
}
