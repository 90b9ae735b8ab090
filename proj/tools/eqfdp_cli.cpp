// eqfdp: theory evaluation, simulation runs, rate studies and the oracle
// transform from the command line.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eqfdp/asymptotics.hpp"
#include "eqfdp/error.hpp"
#include "eqfdp/experiment.hpp"
#include "eqfdp/oracle_transform.hpp"
#include "eqfdp/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace eqfdp;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCheckFailed = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  double pi0 = 0.5;
  double mu = 2.0;
  std::optional<double> alpha;
  std::optional<double> theta;
  bool case_ii = false;
  double rho_c = 1.0;
  double rho_gamma = 0.5;
  std::optional<double> rho;
  std::size_t m = 1000;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  std::string procedure = "bh";
  std::optional<double> threshold;
  std::string out;
  unsigned workers = 0;
  bool check = false;
  bool oracle = false;
  std::vector<std::size_t> m_grid;
  std::string dump_sample;
};

RhoSequence rho_sequence(const Flags& f) {
  const int chosen = (f.theta ? 1 : 0) + (f.case_ii ? 1 : 0) + (f.rho ? 1 : 0);
  if (chosen > 1) {
    throw UsageError("--theta, --case-ii and --rho are mutually exclusive");
  }
  if (f.case_ii) {
    return PowerLaw{f.rho_c, f.rho_gamma};
  }
  if (f.rho) {
    // rho = 0 is independence, i.e. case (i) with theta = 0.
    if (*f.rho == 0.0) {
      return ThetaOverM{0.0};
    }
    return FixedRho{*f.rho};
  }
  return ThetaOverM{f.theta.value_or(0.0)};
}

ThresholdProcedure procedure(const Flags& f) {
  if (f.procedure == "bh") {
    if (!f.alpha) {
      throw UsageError("--alpha is required for --procedure bh");
    }
    return BH{*f.alpha};
  }
  if (!f.threshold) {
    throw UsageError("--threshold is required for --procedure fixed");
  }
  return FixedThreshold{*f.threshold};
}

ExperimentConfig experiment_config(const Flags& f) {
  ExperimentConfig c;
  c.m = f.m;
  c.pi0 = f.pi0;
  c.mu = f.mu;
  c.rho_seq = rho_sequence(f);
  c.procedure = procedure(f);
  c.oracle = f.oracle;
  c.replicates = f.replicates;
  c.seed = f.seed;
  c.workers = f.workers;
  c.m_grid = f.m_grid;
  return c;
}

/// Every option with its resolved value, keyed by its long name.
json flag_echo(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "version" || name == "config") {
      continue;
    }
    if (opt->count() == 0 && opt->get_default_str().empty()) {
      continue;
    }
    if (opt->get_type_size() == 0) {
      j[name] = opt->as<bool>();
    } else if (opt->count() == 0) {
      j[name] = opt->get_default_str();
    } else if (opt->get_expected_max() > 1) {
      j[name] = opt->results();
    } else {
      j[name] = opt->results().front();
    }
  }
  return j;
}

fs::path prepare_out_dir(const std::string& dir) {
  const fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(p);
  return p;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot write " + path.string());
  }
  os << j.dump(2) << '\n';
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot write " + path.string());
  }
  writer(os);
}

json config_echo(const std::string& subcommand, const CLI::App& app, const ExperimentConfig* config) {
  json j;
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["flags"] = flag_echo(app);
  if (config != nullptr) {
    j["experiment"] = to_json(*config);
  }
  return j;
}

json diagnostics_json(const Diagnostics& d) {
  json j;
  const auto opt = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  j["center_ok"] = opt(d.center_ok);
  j["variance_ok"] = opt(d.variance_ok);
  j["ks_ok"] = opt(d.ks_ok);
  j["variance_tolerance"] = d.variance_tolerance;
  j["ks_critical"] = d.ks_critical;
  j["all_passed"] = d.all_passed();
  return j;
}

/// Summary without the per-replicate arrays, for the terminal.
json brief(json summary) {
  summary.erase("per_replicate_fdp");
  if (summary.contains("theory") && summary["theory"].is_object()) {
    summary["theory"].erase("scaled_deviations");
  }
  summary.erase("config");
  return summary;
}

int cmd_theory(const Flags& f, const CLI::App& app) {
  const RhoSequence seq = rho_sequence(f);
  validate(seq);
  const ThresholdProcedure proc = procedure(f);
  validate(proc);
  if (std::holds_alternative<FixedRho>(seq)) {
    throw UsageError("no normal limit at fixed rho; use the oracle subcommand");
  }
  if (!(f.pi0 > 0.0 && f.pi0 < 1.0) || !std::isfinite(f.mu)) {
    throw UsageError("need 0 < pi0 < 1 and finite mu");
  }
  const MixtureCdf cdf(f.pi0, f.mu);
  const AsymptoticLaw law = asymptotic_law(cdf, proc, seq);

  json j;
  j["version"] = kVersion;
  j["pi0"] = f.pi0;
  j["mu"] = f.mu;
  j["law"] = to_json(law);
  j["q_t_star"] = cdf.q(law.t_star);
  j["c_T_squared"] = law.c_T * law.c_T;
  json regimes;
  regimes["case_i_theta_0"] = law_for_regime(cdf, proc, CaseI{0.0}).variance;
  if (const auto* t = std::get_if<ThetaOverM>(&seq)) {
    regimes["case_i_theta"] = law_for_regime(cdf, proc, CaseI{t->theta}).variance;
  }
  regimes["case_ii"] = law_for_regime(cdf, proc, CaseII{}).variance;
  j["variance_by_regime"] = regimes;
  if (const auto* bh = std::get_if<BH>(&proc)) {
    const BhClosedForm cf = bh_closed_form(f.pi0, bh->alpha, law.t_star);
    json c;
    c["sigma2_T"] = cf.sigma2;
    c["c_T_squared"] = cf.c2;
    c["sigma2_T_generic"] = law.sigma2_T;
    c["c_T_squared_generic"] = law.c_T * law.c_T;
    c["center"] = f.pi0 * bh->alpha;
    j["bh_closed_form"] = c;
  } else {
    j["bh_closed_form"] = nullptr;
  }
  std::cout << j.dump(2) << '\n';
  if (!f.out.empty()) {
    const fs::path dir = prepare_out_dir(f.out);
    write_json(dir / "config.json", config_echo("theory", app, nullptr));
    write_json(dir / "theory.json", j);
  }
  return 0;
}

void dump_sample(const Flags& f, const ExperimentConfig& c, const fs::path& dir) {
  if (f.dump_sample.empty()) {
    return;
  }
  const Sample s = sample(c.model_at(c.m), RngStream{c.seed, 0});
  const fs::path p = fs::path(f.dump_sample).is_absolute() ? fs::path(f.dump_sample) : dir / f.dump_sample;
  write_file(p, [&](std::ostream& os) { write_sample_csv(os, s); });
}

int cmd_simulate(const Flags& f, const CLI::App& app, const std::string& name) {
  const ExperimentConfig c = experiment_config(f);
  c.validate();
  const fs::path dir = prepare_out_dir(f.out);
  write_json(dir / "config.json", config_echo(name, app, &c));
  dump_sample(f, c, dir);

  const ExperimentSummary s = run(c);
  json j = to_json(s, c);
  if (c.oracle) {
    const OracleParams op(c.model_at(c.m));
    json o;
    o["mu_tilde"] = op.mu_tilde();
    o["mu_tilde_m"] = op.mu_tilde_m();
    o["rho_tilde"] = op.rho_tilde();
    o["scale"] = op.scale();
    if (const auto* bh = std::get_if<BH>(&c.procedure)) {
      o["t_star_rho"] = t_star_rho(op.base(), bh->alpha);
    }
    j["oracle"] = o;
  }
  write_file(dir / "replicates.csv", [&](std::ostream& os) { write_replicates_csv(os, s); });
  write_json(dir / "summary.json", j);
  std::cout << brief(j).dump(2) << '\n';
  if (f.check && !evaluate(s).all_passed()) {
    std::cerr << "check failed\n";
    return kExitCheckFailed;
  }
  return 0;
}

int cmd_oracle(const Flags& f, const CLI::App& app) {
  if (!f.rho || !(*f.rho > 0.0 && *f.rho < 1.0)) {
    throw UsageError("oracle needs --rho in (0,1)");
  }
  if (f.theta || f.case_ii) {
    throw UsageError("oracle takes --rho only");
  }
  Flags g = f;
  g.oracle = true;
  return cmd_simulate(g, app, "oracle");
}

int cmd_rate_study(const Flags& f, const CLI::App& app) {
  if (f.m_grid.size() < 3) {
    throw UsageError("--m-grid needs at least 3 values");
  }
  const ExperimentConfig c = experiment_config(f);
  c.validate();
  const fs::path dir = prepare_out_dir(f.out);
  write_json(dir / "config.json", config_echo("rate-study", app, &c));

  const std::vector<RateRow> rows = rate_study(c);
  write_file(dir / "rate_study.csv", [&](std::ostream& os) { write_rate_csv(os, rows); });
  json all = json::array();
  bool passed = true;
  for (const RateRow& row : rows) {
    json j = to_json(row.summary, c);
    j["var_sqrtm"] = row.var_sqrtm ? json(*row.var_sqrtm) : json(nullptr);
    all.push_back(j);
    passed = passed && evaluate(row.summary).all_passed();
  }
  write_json(dir / "summary.json", all);
  std::ifstream csv(dir / "rate_study.csv");
  std::cout << csv.rdbuf();
  if (f.check && !passed) {
    std::cerr << "check failed\n";
    return kExitCheckFailed;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic FDP laws under equi-correlation: theory and Monte Carlo"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Flat key = value file; keys are flag names");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Flags f;
  app.add_option("--pi0", f.pi0, "Proportion of true nulls")->capture_default_str();
  app.add_option("--mu", f.mu, "Shift under the alternative")->capture_default_str();
  app.add_option("--alpha", f.alpha, "BH level");
  app.add_option("--theta", f.theta, "Case (i): rho_m = theta / m");
  app.add_flag("--case-ii", f.case_ii, "Case (ii): rho_m = rho-c * m^-rho-gamma");
  app.add_option("--rho-c", f.rho_c, "Case (ii) constant")->capture_default_str();
  app.add_option("--rho-gamma", f.rho_gamma, "Case (ii) exponent in (0,1)")->capture_default_str();
  app.add_option("--rho", f.rho, "Fixed correlation; 0 means independence");
  app.add_option("--m", f.m, "Number of hypotheses")->capture_default_str();
  app.add_option("--replicates", f.replicates, "Monte Carlo replicates")->capture_default_str();
  app.add_option("--seed", f.seed, "Base seed")->capture_default_str();
  app.add_option("--procedure", f.procedure, "bh or fixed")
      ->check(CLI::IsMember({"bh", "fixed"}))
      ->capture_default_str();
  app.add_option("--threshold", f.threshold, "Threshold for --procedure fixed");
  app.add_option("--out", f.out, "Output directory")->envname("EQFDP_OUT_DIR");
  app.add_option("--workers", f.workers, "Worker threads, 0 = all cores")->capture_default_str();
  app.add_flag("--oracle", f.oracle, "Transform p-values with known (pi0, mu, rho); needs --rho in (0,1)");
  app.add_flag("--check", f.check, "Exit nonzero when a diagnostic fails");
  app.add_option("--m-grid", f.m_grid, "Increasing m values for rate-study")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--dump-sample", f.dump_sample, "Write the first replicate's sample to this CSV");

  CLI::App* theory = app.add_subcommand("theory", "Print the limit law as JSON");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo FDP experiment");
  CLI::App* rate = app.add_subcommand("rate-study", "Experiment over an m grid");
  CLI::App* oracle = app.add_subcommand("oracle", "Experiment on oracle-transformed p-values");
  for (CLI::App* sub : {theory, simulate, rate, oracle}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (theory->parsed()) {
      return cmd_theory(f, app);
    }
    if (simulate->parsed()) {
      if (f.oracle) {
        return cmd_oracle(f, app);
      }
      return cmd_simulate(f, app, "simulate");
    }
    if (rate->parsed()) {
      return cmd_rate_study(f, app);
    }
    return cmd_oracle(f, app);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << "run with --help for options\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
