#include "eqfdp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "eqfdp/error.hpp"
#include "eqfdp/oracle_transform.hpp"
#include "eqfdp/stats.hpp"
#include "eqfdp/version.hpp"

namespace eqfdp {

namespace {

unsigned resolve_workers(unsigned requested, std::size_t tasks) {
  unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(tasks, 1)));
}

// Calls body(i) for i in [0, n) on up to `workers` threads. Each index is
// processed exactly once; the first exception is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  const unsigned w = resolve_workers(workers, n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (unsigned k = 0; k < w; ++k) {
    threads.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
          next.store(n);
        }
      }
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

std::string procedure_name(const ThresholdProcedure& p) {
  return std::holds_alternative<BH>(p) ? "bh" : "fixed";
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

ModelParams ExperimentConfig::model_at(std::size_t m_value) const {
  return ModelParams(m_value, pi0, mu, rho_at(rho_seq, m_value));
}

void ExperimentConfig::validate() const {
  eqfdp::validate(rho_seq);
  eqfdp::validate(procedure);
  if (replicates < 1) {
    throw ParameterError("ExperimentConfig: replicates must be positive");
  }
  if (oracle && !std::holds_alternative<FixedRho>(rho_seq)) {
    throw ParameterError("ExperimentConfig: oracle mode needs a fixed rho in (0,1)");
  }
  (void)model_at(m);
}

bool Diagnostics::all_passed() const {
  return center_ok.value_or(true) && variance_ok.value_or(true) && ks_ok.value_or(true);
}

ExperimentSummary run_at(const ExperimentConfig& config, std::size_t m) {
  ExperimentConfig local = config;
  local.m = m;
  local.validate();

  const ModelParams params = local.model_at(m);
  std::optional<OracleParams> oracle;
  if (local.oracle) {
    oracle.emplace(params);
  }

  ExperimentSummary out;
  out.m = m;
  out.rho_m = params.rho();
  out.replicates.resize(local.replicates);

  parallel_for(local.replicates, local.workers, [&](std::size_t r) {
    Sample s = sample(params, RngStream{local.seed, r});
    if (oracle) {
      s = transform(s, *oracle);
    }
    const RejectionResult res = eqfdp::apply(local.procedure, s);
    out.replicates[r] = {res.fdp, res.threshold, res.rejected, res.false_rejections};
  });

  out.per_replicate_fdp.reserve(out.replicates.size());
  for (const auto& rec : out.replicates) {
    out.per_replicate_fdp.push_back(rec.fdp);
  }
  out.mean_fdp = stats::mean(out.per_replicate_fdp);
  const std::size_t R = out.per_replicate_fdp.size();
  if (R >= 2) {
    out.var_fdp = stats::variance(out.per_replicate_fdp);
  }

  std::optional<AsymptoticLaw> law;
  if (oracle) {
    if (const auto* bh = std::get_if<BH>(&local.procedure)) {
      law = oracle_law(params, bh->alpha);
    } else {
      law = oracle_law(params, local.procedure);
    }
  } else {
    try {
      law = asymptotic_law(MixtureCdf(local.pi0, local.mu), local.procedure, local.rho_seq);
    } catch (const RegimeError& e) {
      out.theory_warning = e.what();
    }
  }
  if (!law) {
    return out;
  }

  TheoryComparison th;
  th.law = *law;
  th.rate = law->rate(m, params.rho());
  th.theory_variance = law->variance;
  th.scaled_deviations.reserve(R);
  for (double f : out.per_replicate_fdp) {
    th.scaled_deviations.push_back(th.rate * (f - law->center));
  }
  if (R >= 2) {
    th.var_scaled = stats::variance(th.scaled_deviations);
    th.mc_se_variance = *th.var_scaled * std::sqrt(2.0 / static_cast<double>(R - 1));
  }
  if (R >= kMinDiagnosticReplicates && law->variance > 0.0) {
    th.variance_ratio = *th.var_scaled / law->variance;
    th.ks_statistic = stats::ks_statistic_normal(th.scaled_deviations, law->variance);
  }
  out.theory = std::move(th);
  return out;
}

ExperimentSummary run(const ExperimentConfig& config) {
  return run_at(config, config.m);
}

Diagnostics evaluate(const ExperimentSummary& summary) {
  Diagnostics d;
  const std::size_t R = summary.per_replicate_fdp.size();
  d.ks_critical = stats::ks_critical_1pct(R);
  if (!summary.theory) {
    return d;
  }
  const auto& th = *summary.theory;
  if (summary.var_fdp && R >= kMinDiagnosticReplicates) {
    d.center_ok = std::fabs(summary.mean_fdp - th.law.center) <= 4.0 * std::sqrt(*summary.var_fdp / static_cast<double>(R));
  }
  if (th.variance_ratio && th.mc_se_variance) {
    d.variance_tolerance = std::max(0.15, 4.0 * *th.mc_se_variance / th.theory_variance);
    d.variance_ok = std::fabs(*th.variance_ratio - 1.0) <= d.variance_tolerance;
  }
  if (th.ks_statistic) {
    d.ks_ok = *th.ks_statistic <= d.ks_critical;
  }
  return d;
}

std::vector<RateRow> rate_study(const ExperimentConfig& config) {
  if (config.m_grid.size() < 3) {
    throw ParameterError("rate_study: m_grid needs at least 3 points");
  }
  if (!std::is_sorted(config.m_grid.begin(), config.m_grid.end(), std::less_equal<>())) {
    throw ParameterError("rate_study: m_grid must be strictly increasing");
  }
  std::vector<RateRow> rows;
  for (std::size_t m : config.m_grid) {
    RateRow row;
    row.m = m;
    row.summary = run_at(config, m);
    if (row.summary.var_fdp) {
      row.var_sqrtm = static_cast<double>(m) * *row.summary.var_fdp;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

EcdfCovarianceProbe ecdf_covariance_probe(const ModelParams& params, const std::vector<double>& grid,
                                          std::size_t replicates, std::uint64_t seed, unsigned workers,
                                          std::size_t bootstrap_resamples) {
  if (grid.empty()) {
    throw ParameterError("ecdf_covariance_probe: empty grid");
  }
  for (double t : grid) {
    if (!(t > 0.0 && t < 1.0)) {
      throw ParameterError("ecdf_covariance_probe: grid points must lie in (0,1)");
    }
  }
  if (replicates < 2) {
    throw ParameterError("ecdf_covariance_probe: need at least two replicates");
  }
  const MixtureCdf cdf(params.pi0(), params.mu());
  const std::size_t k = grid.size();
  const std::size_t dim = 2 * k;
  const double root_m = std::sqrt(static_cast<double>(params.m()));

  // values[j][r]: coordinate j of replicate r.
  std::vector<std::vector<double>> values(dim, std::vector<double>(replicates));
  parallel_for(replicates, workers, [&](std::size_t r) {
    const EcdfTriple e = ecdf_triple(sample(params, RngStream{seed, r}));
    for (std::size_t i = 0; i < k; ++i) {
      values[i][r] = root_m * (e.g0(grid[i]) - grid[i]);
      values[k + i][r] = root_m * (e.g1(grid[i]) - cdf.g1(grid[i]));
    }
  });

  EcdfCovarianceProbe out;
  out.grid = grid;
  out.covariance.assign(dim, std::vector<double>(dim));
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) {
      out.covariance[a][b] = stats::covariance(values[a], values[b]);
    }
  }

  // Nonparametric bootstrap over replicates.
  std::vector<std::vector<double>> sum(dim, std::vector<double>(dim));
  std::vector<std::vector<double>> sum_sq(dim, std::vector<double>(dim));
  auto engine = make_engine(RngStream{seed, replicates});
  std::vector<std::size_t> pick(replicates);
  std::vector<double> mean(dim);
  for (std::size_t b = 0; b < bootstrap_resamples; ++b) {
    for (auto& idx : pick) {
      idx = static_cast<std::size_t>(open_uniform(engine) * static_cast<double>(replicates));
    }
    for (std::size_t a = 0; a < dim; ++a) {
      double s = 0.0;
      for (std::size_t idx : pick) {
        s += values[a][idx];
      }
      mean[a] = s / static_cast<double>(replicates);
    }
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t c = a; c < dim; ++c) {
        double s = 0.0;
        for (std::size_t idx : pick) {
          s += (values[a][idx] - mean[a]) * (values[c][idx] - mean[c]);
        }
        const double cov = s / static_cast<double>(replicates - 1);
        sum[a][c] += cov;
        sum_sq[a][c] += cov * cov;
      }
    }
  }
  out.bootstrap_se.assign(dim, std::vector<double>(dim));
  const double nb = static_cast<double>(bootstrap_resamples);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t c = a; c < dim; ++c) {
      double se = 0.0;
      if (bootstrap_resamples >= 2) {
        const double m1 = sum[a][c] / nb;
        se = std::sqrt(std::max(0.0, (sum_sq[a][c] - nb * m1 * m1) / (nb - 1.0)));
      }
      out.bootstrap_se[a][c] = out.bootstrap_se[c][a] = se;
    }
  }
  return out;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["m"] = config.m;
  j["pi0"] = config.pi0;
  j["mu"] = config.mu;
  std::visit(
      [&j](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ThetaOverM>) {
          j["rho_sequence"] = {{"kind", "theta_over_m"}, {"theta", s.theta}};
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          j["rho_sequence"] = {{"kind", "power_law"}, {"c", s.c}, {"gamma", s.gamma}};
        } else {
          j["rho_sequence"] = {{"kind", "fixed"}, {"rho", s.rho}};
        }
      },
      config.rho_seq);
  if (const auto* bh = std::get_if<BH>(&config.procedure)) {
    j["procedure"] = {{"kind", "bh"}, {"alpha", bh->alpha}};
  } else {
    j["procedure"] = {{"kind", "fixed"}, {"t", std::get<FixedThreshold>(config.procedure).t}};
  }
  j["oracle"] = config.oracle;
  j["replicates"] = config.replicates;
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  j["m_grid"] = config.m_grid;
  return j;
}

nlohmann::json to_json(const AsymptoticLaw& law) {
  nlohmann::json j;
  if (const auto* ci = std::get_if<CaseI>(&law.regime)) {
    j["regime"] = "case_i";
    j["theta"] = ci->theta;
  } else {
    j["regime"] = "case_ii";
    j["theta"] = nullptr;
  }
  j["rate"] = law.rate_description();
  j["t_star"] = law.t_star;
  j["center"] = law.center;
  j["c_T"] = law.c_T;
  j["sigma2_T"] = law.sigma2_T;
  j["variance"] = law.variance;
  return j;
}

nlohmann::json to_json(const ExperimentSummary& summary, const ExperimentConfig& config) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["config"] = to_json(config);
  j["procedure"] = procedure_name(config.procedure);
  j["m"] = summary.m;
  j["rho_m"] = summary.rho_m;
  j["replicates"] = summary.per_replicate_fdp.size();
  j["mean_fdp"] = summary.mean_fdp;
  j["var_fdp"] = optional_json(summary.var_fdp);
  j["per_replicate_fdp"] = summary.per_replicate_fdp;
  if (!summary.theory) {
    j["theory"] = nullptr;
    j["warning"] = summary.theory_warning;
    return j;
  }
  const auto& th = *summary.theory;
  nlohmann::json t = to_json(th.law);
  t["rate_value"] = th.rate;
  t["theory_variance"] = th.theory_variance;
  t["var_scaled"] = optional_json(th.var_scaled);
  t["mc_se_variance"] = optional_json(th.mc_se_variance);
  t["variance_ratio"] = optional_json(th.variance_ratio);
  t["ks_statistic"] = optional_json(th.ks_statistic);
  t["scaled_deviations"] = th.scaled_deviations;
  j["theory"] = t;

  const Diagnostics d = evaluate(summary);
  const auto opt_bool = [](const std::optional<bool>& b) { return b ? nlohmann::json(*b) : nlohmann::json(nullptr); };
  j["diagnostics"] = {{"center_ok", opt_bool(d.center_ok)},
                      {"variance_ok", opt_bool(d.variance_ok)},
                      {"ks_ok", opt_bool(d.ks_ok)},
                      {"variance_tolerance", d.variance_tolerance},
                      {"ks_critical", d.ks_critical},
                      {"all_passed", d.all_passed()}};
  return j;
}

void write_replicates_csv(std::ostream& os, const ExperimentSummary& summary) {
  os << "replicate,fdp,scaled_deviation,threshold,rejected,false_rejections\n";
  os << std::setprecision(17);
  for (std::size_t r = 0; r < summary.replicates.size(); ++r) {
    const auto& rec = summary.replicates[r];
    os << r << ',' << rec.fdp << ',';
    if (summary.theory) {
      os << summary.theory->scaled_deviations[r];
    }
    os << ',' << rec.threshold << ',' << rec.rejected << ',' << rec.false_rejections << '\n';
  }
}

void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows) {
  os << "m,rho_m,mean_fdp,var_fdp,var_sqrtm,var_scaled,theory_variance,variance_ratio,ks_statistic\n";
  os << std::setprecision(17);
  const auto opt = [&os](const std::optional<double>& v) {
    if (v) {
      os << *v;
    }
  };
  for (const auto& row : rows) {
    const auto& s = row.summary;
    os << row.m << ',' << s.rho_m << ',' << s.mean_fdp << ',';
    opt(s.var_fdp);
    os << ',';
    opt(row.var_sqrtm);
    os << ',';
    if (s.theory) {
      opt(s.theory->var_scaled);
      os << ',' << s.theory->theory_variance << ',';
      opt(s.theory->variance_ratio);
      os << ',';
      opt(s.theory->ks_statistic);
    } else {
      os << ",,,";
    }
    os << '\n';
  }
}

} // namespace eqfdp
