#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eqfdp/asymptotics.hpp"
#include "eqfdp/model.hpp"
#include "eqfdp/procedures.hpp"

namespace eqfdp {

/// Minimum replicate count before variance ratio and KS diagnostics are reported.
inline constexpr std::size_t kMinDiagnosticReplicates = 100;

struct ExperimentConfig {
  std::size_t m = 1000;
  double pi0 = 0.5;
  double mu = 2.0;
  RhoSequence rho_seq = ThetaOverM{0.0};
  ThresholdProcedure procedure = BH{0.2};
  /// Apply the oracle transform before thresholding (requires FixedRho).
  bool oracle = false;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  /// Rate studies only.
  std::vector<std::size_t> m_grid;

  /// Model at a given m, with rho = rho_at(rho_seq, m).
  ModelParams model_at(std::size_t m_value) const;
  /// Throws ParameterError on invalid settings.
  void validate() const;
};

struct ReplicateRecord {
  double fdp = 0.0;
  double threshold = 0.0;
  std::size_t rejected = 0;
  std::size_t false_rejections = 0;
};

struct TheoryComparison {
  AsymptoticLaw law;
  double rate = 0.0; ///< a_m
  std::vector<double> scaled_deviations; ///< rate * (fdp - law.center)
  double theory_variance = 0.0;
  std::optional<double> var_scaled;
  std::optional<double> mc_se_variance; ///< var_scaled * sqrt(2 / (R - 1))
  std::optional<double> variance_ratio;
  std::optional<double> ks_statistic;
};

struct ExperimentSummary {
  std::size_t m = 0;
  double rho_m = 0.0;
  std::vector<ReplicateRecord> replicates;
  std::vector<double> per_replicate_fdp;
  double mean_fdp = 0.0;
  std::optional<double> var_fdp;
  std::optional<TheoryComparison> theory;
  /// Why theory is absent, if it is.
  std::string theory_warning;
};

/// Outcome of the standard tolerance checks. Each field is empty when the
/// corresponding quantity was not computed.
struct Diagnostics {
  std::optional<bool> center_ok;   ///< |mean_fdp - center| <= 4 sqrt(var_fdp / R)
  std::optional<bool> variance_ok; ///< ratio within 1 +- max(0.15, 4 se / V)
  std::optional<bool> ks_ok;       ///< KS <= 1.63 / sqrt(R)
  double variance_tolerance = 0.0;
  double ks_critical = 0.0;

  /// True unless some computed check failed.
  bool all_passed() const;
};

/// Runs R replicates of sample -> (transform) -> procedure -> FDP.
/// Replicate r uses RngStream{seed, r}; the result is independent of the
/// worker count.
ExperimentSummary run(const ExperimentConfig& config);

/// Same as run() with the number of hypotheses overridden.
ExperimentSummary run_at(const ExperimentConfig& config, std::size_t m);

Diagnostics evaluate(const ExperimentSummary& summary);

struct RateRow {
  std::size_t m = 0;
  ExperimentSummary summary;
  /// m * var_fdp, which grows when the rate is slower than sqrt(m).
  std::optional<double> var_sqrtm;
};

/// One run per m in config.m_grid (strictly increasing, at least 3 points).
std::vector<RateRow> rate_study(const ExperimentConfig& config);

/// Empirical covariances of sqrt(m)(G0_hat(t) - t) and sqrt(m)(G1_hat(t) - G1(t))
/// over replicates, with bootstrap standard errors.
struct EcdfCovarianceProbe {
  std::vector<double> grid;
  /// Row/column index = group * grid.size() + k, group 0 = null, 1 = alternative.
  std::vector<std::vector<double>> covariance;
  std::vector<std::vector<double>> bootstrap_se;

  std::size_t index(EcdfGroup g, std::size_t k) const {
    return (g == EcdfGroup::Null ? 0 : grid.size()) + k;
  }
};

EcdfCovarianceProbe ecdf_covariance_probe(const ModelParams& params, const std::vector<double>& grid,
                                          std::size_t replicates, std::uint64_t seed, unsigned workers = 0,
                                          std::size_t bootstrap_resamples = 200);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const AsymptoticLaw& law);
/// Summary JSON: all summary fields, the config echo and the version string.
nlohmann::json to_json(const ExperimentSummary& summary, const ExperimentConfig& config);

/// CSV `replicate,fdp,scaled_deviation,threshold,rejected,false_rejections`.
/// scaled_deviation is empty when no theory is available.
void write_replicates_csv(std::ostream& os, const ExperimentSummary& summary);

/// CSV `m,rho_m,mean_fdp,var_fdp,var_sqrtm,var_scaled,theory_variance,variance_ratio,ks_statistic`.
void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows);

} // namespace eqfdp
