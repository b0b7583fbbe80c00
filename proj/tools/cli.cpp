#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quantest/adaptive.hpp"
#include "quantest/design.hpp"
#include "quantest/distributions.hpp"
#include "quantest/error.hpp"
#include "quantest/io.hpp"
#include "quantest/quantizer.hpp"
#include "quantest/sim.hpp"
#include "quantest/tables.hpp"
#include "quantest/version.hpp"

namespace quantest::cli {
namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw DomainError("config " + path + ": " + e.what());
  }
}

// Distribution flags shared by every subcommand. Each one overrides the
// matching config field only when it was given on the command line.
struct DistFlags {
  std::string family = "ggd";
  double beta = 2.0;
  double mu = 0.0;
  double delta = 1.0;
  CLI::Option* o_family = nullptr;
  CLI::Option* o_beta = nullptr;
  CLI::Option* o_mu = nullptr;
  CLI::Option* o_delta = nullptr;

  void add(CLI::App* app) {
    o_family = app->add_option("--family", family, "Noise family: ggd or std")
                   ->check(CLI::IsMember({"ggd", "std"}));
    o_beta = app->add_option("--beta", beta, "Shape parameter (GGD exponent or STD degrees of freedom)");
    o_mu = app->add_option("--mu", mu, "Location parameter");
    o_delta = app->add_option("--delta", delta, "Scale parameter");
  }

  Distribution apply(const json& base_dist) const {
    json d = base_dist.is_object() ? base_dist : json::object();
    if (o_family->count() || !d.contains("family")) d["family"] = family;
    if (o_beta->count() || !d.contains("beta")) d["beta"] = beta;
    if (o_mu->count() || !d.contains("mu")) d["mu"] = mu;
    if (o_delta->count() || !d.contains("delta")) d["delta"] = delta;
    return d.get<Distribution>();
  }
};

struct DesignFlags {
  DistFlags dist;
  std::string param = "location";
  int bits = 4;
  std::string config;
  CLI::Option* o_param = nullptr;
  CLI::Option* o_bits = nullptr;

  void add(CLI::App* app) {
    dist.add(app);
    o_param = app->add_option("--param", param, "Parameter to estimate: location or scale")
                  ->check(CLI::IsMember({"location", "scale"}));
    o_bits = app->add_option("--bits", bits, "Number of quantizer bits N_B");
    app->add_option("--config", config, "JSON config file; flags override its fields");
  }

  DesignSpec build(json& cfg) const {
    cfg = load_config(config);
    DesignSpec s;
    s.dist = dist.apply(cfg.value("dist", json::object()));
    s.kind = parse_param_kind(o_param->count() ? param : cfg.value("param", param));
    s.n_bits = o_bits->count() ? bits : cfg.value("bits", bits);
    s.validate();
    return s;
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw DomainError("not a number in threshold list: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string fixed8(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8f", x);
  return buf;
}

void write_json(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string cell_table(const Quantizer& q, const Distribution& d, ParamKind kind) {
  std::ostringstream os;
  write_cell_table_csv(os, q, d, kind);
  return os.str();
}

unsigned thread_count(CLI::Option* o, unsigned flag) {
  if (o->count()) return flag;
  if (const char* env = std::getenv("QUANTEST_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0') throw DomainError(std::string("QUANTEST_THREADS is not a thread count: ") + env);
    return static_cast<unsigned>(v);
  }
  return 0;
}

// ---- design ----------------------------------------------------------

struct DesignCmd {
  DesignFlags f;
  std::string method = "closed";
  bool asymmetric = false;
  std::string out = "design.json";
  std::string csv;
  CLI::Option* o_method = nullptr;

  void add(CLI::App* app) {
    f.add(app);
    o_method = app->add_option("--method", method, "closed, numeric, exhaustive or uniform")
        ->check(CLI::IsMember({"closed", "numeric", "exhaustive", "uniform"}));
    app->add_flag("--asymmetric", asymmetric, "Exhaustive search without the symmetry constraint");
    app->add_option("--out", out, "Output JSON path");
    app->add_option("--csv", csv, "Optional CSV cell table path");
  }

  int run(std::ostream& os) const {
    json cfg;
    const DesignSpec spec = f.build(cfg);
    const std::string m = o_method->count() ? method : cfg.value("method", method);

    Quantizer q = Quantizer(std::vector<double>{spec.dist.mu()});
    if (m == "closed") {
      q = practical_thresholds(spec);
    } else if (m == "numeric") {
      q = thresholds_from_density_numeric(optimal_density_numeric(spec), spec.intervals());
    } else if (m == "exhaustive") {
      q = exhaustive_optimal_thresholds(spec, !asymmetric && spec.n_bits > 1).quantizer;
    } else if (m == "uniform") {
      q = optimal_uniform_quantizer(spec).quantizer;
    } else {
      throw DomainError("unknown design method: " + m);
    }
    const double fi_exact = quantized_fi(q, spec.dist, spec.kind);
    const double fi_asym = asymptotic_fi(spec);

    json j{{"spec", spec}, {"method", m}, {"thresholds", q}, {"fi_exact", fi_exact}, {"fi_asymptotic", fi_asym}};
    write_json(out, j);
    if (!csv.empty()) write_text_file(csv, cell_table(q, spec.dist, spec.kind));
    os << "design " << describe(spec.dist) << ' ' << to_string(spec.kind) << " bits=" << spec.n_bits
       << " method=" << m << " thresholds=" << q.thresholds().size() << " fi_exact=" << fixed8(fi_exact)
       << " fi_asymptotic=" << fixed8(fi_asym) << " -> " << out << '\n';
    return kOk;
  }
};

// ---- fi --------------------------------------------------------------

struct FiCmd {
  DesignFlags f;
  std::string thresholds;
  std::string quantizer_file;
  std::string out;
  std::string csv;

  void add(CLI::App* app) {
    f.add(app);
    app->add_option("--thresholds", thresholds, "Comma-separated thresholds");
    app->add_option("--quantizer", quantizer_file,
                    "JSON file with a threshold array or a design output");
    app->add_option("--out", out, "Optional output JSON path");
    app->add_option("--csv", csv, "Optional CSV cell table path");
  }

  int run(std::ostream& os) const {
    json cfg;
    DesignSpec spec;
    cfg = load_config(f.config);
    spec.dist = f.dist.apply(cfg.value("dist", json::object()));
    spec.kind = parse_param_kind(f.o_param->count() ? f.param : cfg.value("param", f.param));

    std::vector<double> tau;
    if (!thresholds.empty()) {
      tau = parse_list(thresholds);
    } else if (!quantizer_file.empty()) {
      const json qj = load_config(quantizer_file);
      tau = quantizer_from_json(qj.is_object() ? qj.at("thresholds") : qj).thresholds();
    } else if (cfg.contains("thresholds")) {
      tau = cfg["thresholds"].get<std::vector<double>>();
    } else {
      throw DomainError("fi: give --thresholds, --quantizer or a config with a thresholds array");
    }
    const Quantizer q(tau);
    const QuantizedFi r = quantized_fi_report(q, spec.dist, spec.kind);
    if (!out.empty()) {
      write_json(out, json{{"dist", spec.dist},
                           {"param", to_string(spec.kind)},
                           {"thresholds", q},
                           {"fi_exact", r.value},
                           {"zero_cells", r.zero_cells},
                           {"degenerate", r.degenerate}});
    }
    if (!csv.empty()) write_text_file(csv, cell_table(q, spec.dist, spec.kind));
    os << "fi " << describe(spec.dist) << ' ' << to_string(spec.kind) << " intervals=" << q.intervals()
       << " fi_exact=" << fixed8(r.value) << (r.degenerate ? " degenerate" : "") << '\n';
    return kOk;
  }
};

// ---- table -----------------------------------------------------------

struct TableCmd {
  std::string which = "1";
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--which", which, "1 (location) or 2 (scale)")->required();
    app->add_option("--out", out, "Output CSV path (default table<which>.csv)");
  }

  int run(std::ostream& os) const {
    const TableId id = parse_table_id(which);
    const auto rows = reproduce_table(id);
    std::ostringstream csv;
    write_table_csv(csv, rows);
    const std::string path = out.empty() ? "table" + std::to_string(static_cast<int>(id)) + ".csv" : out;
    write_text_file(path, csv.str());
    double worst = 0.0;
    for (const auto& r : rows) {
      worst = std::max({worst, std::abs(r.optimal - r.reference.optimal), std::abs(r.uniform - r.reference.uniform),
                        std::abs(r.practical - r.reference.practical)});
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", worst);
    os << "table " << static_cast<int>(id) << " rows=" << rows.size() << " max_abs_delta=" << buf << " -> " << path
       << '\n';
    return kOk;
  }
};

// ---- simulate --------------------------------------------------------

struct SimulateCmd {
  DistFlags dist;
  std::string mode = "location";
  int bits = 4;
  std::size_t realizations = 1000;
  std::size_t block = 50000;
  double mu0 = 1.0;
  double delta0 = 1.0;
  std::uint64_t seed = 1;
  std::size_t warm_start = 0;
  double shrink_limit = 0.1;
  unsigned threads = 0;
  bool figure = false;
  std::size_t trajectories = 0;
  std::string config;
  std::string out = "sim.csv";
  std::string svg;
  std::string manifest_path;
  std::string trajectories_out;
  CLI::Option *o_mode, *o_bits, *o_real, *o_block, *o_mu0, *o_delta0, *o_seed, *o_warm, *o_shrink, *o_threads;

  void add(CLI::App* app) {
    dist.add(app);
    o_mode = app->add_option("--mode", mode, "location, scale or joint")
                 ->check(CLI::IsMember({"location", "scale", "joint"}));
    o_bits = app->add_option("--bits", bits, "Number of quantizer bits N_B");
    o_real = app->add_option("--realizations", realizations, "Independent realizations");
    o_block = app->add_option("--block", block, "Samples per realization");
    o_mu0 = app->add_option("--mu0", mu0, "Initial location estimate");
    o_delta0 = app->add_option("--delta0", delta0, "Initial scale estimate");
    o_seed = app->add_option("--seed", seed, "Root seed");
    o_warm = app->add_option("--warm-start", warm_start, "Steps driven by uniform thresholds before switching");
    o_shrink = app->add_option("--shrink-limit", shrink_limit,
                               "Lower bound on delta_hat_k / delta_hat_{k-1}; 0 disables");
    o_threads = app->add_option("--threads", threads, "Worker cap (0 = all cores; env QUANTEST_THREADS)");
    app->add_flag("--figure-defaults", figure,
                  "Initial estimates of the reference experiments: mu0 = mu + 1 (location, joint), "
                  "delta0 = 2 delta (scale, joint)");
    app->add_option("--config", config, "JSON config file; flags override its fields");
    app->add_option("--out", out, "Output CSV path");
    app->add_option("--svg", svg, "Optional SVG plot path");
    app->add_option("--manifest", manifest_path, "Run manifest JSON path (default <out>.json)");
    app->add_option("--trajectories", trajectories, "Number of realizations whose trajectories are exported");
    app->add_option("--trajectories-out", trajectories_out, "Trajectory CSV path (default <out>.traj.csv)");
  }

  template <class T>
  static void take(CLI::Option* o, T& dst, const T& v) {
    if (o->count()) dst = v;
  }

  int run(std::ostream& os) const {
    json file = load_config(config);
    if (!file.contains("mode") && file.contains("config")) file = json(file["config"]);  // a run manifest
    SimConfig cfg;
    if (file.contains("mode")) {
      json f = file;
      if (!f.contains("dist")) f["dist"] = cfg.dist;
      cfg = f.get<SimConfig>();
    }
    cfg.dist = dist.apply(file.value("dist", json::object()));
    if (!file.contains("mode") || o_mode->count()) cfg.mode = parse_estimator_mode(mode);
    if (figure) {
      const SimConfig fc = figure_config(cfg.mode, cfg.dist, cfg.n_bits);
      cfg.initial_mu_hat = fc.initial_mu_hat;
      cfg.initial_delta_hat = fc.initial_delta_hat;
    }
    take(o_bits, cfg.n_bits, bits);
    take(o_real, cfg.realizations, realizations);
    take(o_block, cfg.block_length, block);
    take(o_mu0, cfg.initial_mu_hat, mu0);
    take(o_delta0, cfg.initial_delta_hat, delta0);
    take(o_seed, cfg.seed, seed);
    take(o_warm, cfg.warm_start_steps, warm_start);
    take(o_shrink, cfg.scale_shrink_limit, shrink_limit);
    cfg.threads = thread_count(o_threads, threads);
    cfg.validate();

    const SimResult r = run_simulation(cfg);
    write_text_file(out, to_csv(r));
    json man = manifest(r);
    man["config"] = cfg;
    write_json(manifest_path.empty() ? out + ".json" : manifest_path, man);
    if (!svg.empty()) write_text_file(svg, to_svg(r));
    if (trajectories > 0) {
      std::ostringstream t;
      write_trajectories_csv(t, cfg, trajectories);
      write_text_file(trajectories_out.empty() ? out + ".traj.csv" : trajectories_out, t.str());
    }

    const double k = static_cast<double>(r.k.back());
    os << "simulate " << to_string(cfg.mode) << ' ' << describe(cfg.dist) << " bits=" << cfg.n_bits
       << " realizations=" << r.realizations << " k=" << r.k.back();
    if (r.tracks_mu) os << " k*mse_mu=" << fixed8(k * r.mse_mu.back()) << " k*crb_mu=" << fixed8(k * r.crb_mu.back());
    if (r.tracks_delta) {
      os << " k*mse_delta=" << fixed8(k * r.mse_delta.back()) << " k*crb_delta=" << fixed8(k * r.crb_delta.back());
    }
    os << " -> " << out << '\n';
    return kOk;
  }
};

// ---- coeffs ----------------------------------------------------------

struct CoeffsCmd {
  DesignFlags f;
  bool joint = false;
  std::string out = "coeffs.csv";

  void add(CLI::App* app) {
    f.add(app);
    app->add_flag("--joint", joint,
                  "Joint-estimator quantizer: location design at delta = 1, both score columns");
    app->add_option("--out", out, "Output CSV path");
  }

  int run(std::ostream& os) const {
    json cfg;
    DesignSpec spec = f.build(cfg);
    std::ostringstream csv;
    if (joint) {
      spec.kind = ParamKind::Location;
      const JointStaticQuantizer jq = make_joint_static_quantizer(spec);
      const auto& tau = jq.thresholds.thresholds();
      csv << "i,tau_i,eta_mu_i,eta_delta_i\n";
      for (std::size_t i = 0; i < jq.eta_mu.size(); ++i) {
        csv << i + 1 << ',' << format_real(i < tau.size() ? tau[i] : INFINITY) << ',' << format_real(jq.eta_mu[i])
            << ',' << format_real(jq.eta_delta[i]) << '\n';
      }
      write_text_file(out, csv.str());
      os << "coeffs joint " << describe(spec.dist) << " bits=" << spec.n_bits << " fi_mu=" << fixed8(jq.fi_mu)
         << " fi_delta=" << fixed8(jq.fi_delta) << " -> " << out << '\n';
      return kOk;
    }
    const StaticQuantizerSpec s = make_static_quantizer(spec);
    const Distribution unit = spec.dist.standardized();
    write_cell_table_csv(csv, s.thresholds, unit, spec.kind);
    write_text_file(out, csv.str());
    os << "coeffs " << describe(spec.dist) << ' ' << to_string(spec.kind) << " bits=" << spec.n_bits
       << " fi_ref=" << fixed8(s.fi_ref) << " -> " << out << '\n';
    return kOk;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fisher-information-optimal scalar quantizers for location and scale estimation", "quantest"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);

  DesignCmd design;
  FiCmd fi;
  TableCmd table;
  SimulateCmd simulate;
  CoeffsCmd coeffs;
  auto* c_design = app.add_subcommand("design", "Design thresholds and report exact and asymptotic FI");
  auto* c_fi = app.add_subcommand("fi", "Exact Fisher information of a given threshold set");
  auto* c_table = app.add_subcommand("table", "Reproduce the location (1) or scale (2) FI table");
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo run of the adaptive estimators");
  auto* c_coeffs = app.add_subcommand("coeffs", "Normalized thresholds and score coefficients of the static quantizer");
  design.add(c_design);
  fi.add(c_fi);
  table.add(c_table);
  simulate.add(c_sim);
  coeffs.add(c_coeffs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version also arrive here, with exit code 0.
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (c_design->parsed()) return design.run(out);
    if (c_fi->parsed()) return fi.run(out);
    if (c_table->parsed()) return table.run(out);
    if (c_sim->parsed()) return simulate.run(out);
    if (c_coeffs->parsed()) return coeffs.run(out);
  } catch (const DomainError& e) {
    err << "quantest: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "quantest: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "quantest: bad config: " << e.what() << '\n';
    return kUsage;
  } catch (const NoConvergence& e) {
    err << "quantest: " << e.what() << '\n';
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "quantest: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace quantest::cli
