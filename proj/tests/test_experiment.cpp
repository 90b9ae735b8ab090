#include <cmath>
#include <sstream>

#include "doctest.h"
#include "eqfdp/error.hpp"
#include "eqfdp/experiment.hpp"
#include "eqfdp/stats.hpp"

using namespace eqfdp;

namespace {

ExperimentConfig base_config() {
  ExperimentConfig c;
  c.m = 1000;
  c.pi0 = 0.5;
  c.mu = 2.0;
  c.rho_seq = ThetaOverM{0.0};
  c.procedure = BH{0.2};
  c.replicates = 1000;
  c.seed = 7;
  c.workers = 1;
  return c;
}

} // namespace

TEST_CASE("stats helpers") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::variance(x) == doctest::Approx(5.0 / 3.0));
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) {
    grid.push_back((i + 0.5) / 100.0);
  }
  CHECK(stats::ks_statistic(grid, [](double u) { return u; }) == doctest::Approx(0.005));
  CHECK(stats::ks_statistic(std::vector<double>{10.0}, [](double) { return 1.0; }) == doctest::Approx(1.0));
  CHECK(stats::ks_critical_1pct(10000) == doctest::Approx(0.0163));
  CHECK_THROWS_AS(stats::variance(std::vector<double>{1.0}), ParameterError);
}

TEST_CASE("single replicate leaves moments absent") {
  auto c = base_config();
  c.replicates = 1;
  const auto s = run(c);
  CHECK(s.per_replicate_fdp.size() == 1);
  CHECK_FALSE(s.var_fdp.has_value());
  REQUIRE(s.theory.has_value());
  CHECK_FALSE(s.theory->var_scaled.has_value());
  CHECK_FALSE(s.theory->ks_statistic.has_value());
  CHECK(evaluate(s).all_passed());
}

TEST_CASE("results do not depend on the worker count") {
  auto c = base_config();
  c.m = 300;
  c.replicates = 200;
  c.workers = 1;
  const auto a = run(c);
  c.workers = 3;
  const auto b = run(c);
  CHECK(a.per_replicate_fdp == b.per_replicate_fdp);
  CHECK(a.theory->scaled_deviations == b.theory->scaled_deviations);
  CHECK(*a.theory->ks_statistic == *b.theory->ks_statistic);
  std::ostringstream ca, cb;
  write_replicates_csv(ca, a);
  write_replicates_csv(cb, b);
  CHECK(ca.str() == cb.str());
}

TEST_CASE("summary invariants") {
  const auto s = run(base_config());
  const auto& th = *s.theory;
  for (std::size_t r = 0; r < s.per_replicate_fdp.size(); ++r) {
    CHECK(th.scaled_deviations[r] == th.rate * (s.per_replicate_fdp[r] - th.law.center));
    const auto& rec = s.replicates[r];
    CHECK(rec.false_rejections <= rec.rejected);
    CHECK(rec.fdp == s.per_replicate_fdp[r]);
  }
  CHECK(*th.ks_statistic >= 0.0);
  CHECK(*th.ks_statistic <= 1.0);
  CHECK(*th.mc_se_variance == doctest::Approx(*th.var_scaled * std::sqrt(2.0 / 999.0)));
  // CLT-consistent mean around pi0 alpha.
  CHECK(std::fabs(s.mean_fdp - 0.1) <= 4.0 * std::sqrt(*s.var_fdp / 1000.0));
  const auto d = evaluate(s);
  CHECK(d.center_ok.value());
  CHECK(d.variance_tolerance >= 0.15);
}

TEST_CASE("fixed rho without the oracle reports raw moments only") {
  auto c = base_config();
  c.rho_seq = FixedRho{0.3};
  c.replicates = 50;
  const auto s = run(c);
  CHECK_FALSE(s.theory.has_value());
  CHECK(s.var_fdp.has_value());
  CHECK(s.theory_warning.find("fixed rho") != std::string::npos);
  const auto j = to_json(s, c);
  CHECK(j["theory"].is_null());
  CHECK(j.contains("warning"));
}

TEST_CASE("config validation") {
  auto c = base_config();
  c.oracle = true;
  CHECK_THROWS_AS(run(c), ParameterError);
  c = base_config();
  c.replicates = 0;
  CHECK_THROWS_AS(run(c), ParameterError);
  c = base_config();
  c.procedure = BH{1.5};
  CHECK_THROWS_AS(run(c), ParameterError);
  c = base_config();
  c.m_grid = {100, 200};
  CHECK_THROWS_AS(rate_study(c), ParameterError);
  c.m_grid = {100, 300, 200};
  CHECK_THROWS_AS(rate_study(c), ParameterError);
}

TEST_CASE("fixed threshold through the generic pipeline") {
  // Independence: sigma2 alone. theta = 4: sigma2 + 4 c^2, which exercises c(T).
  // No KS here: at this m the FDP lattice alone moves KS by ~0.015.
  for (double theta : {0.0, 4.0}) {
    CAPTURE(theta);
    auto c = base_config();
    c.m = 4000;
    c.replicates = 2000;
    c.procedure = FixedThreshold{0.5};
    c.rho_seq = ThetaOverM{theta};
    const auto s = run(c);
    const auto d = evaluate(s);
    CHECK(d.center_ok.value());
    CHECK(d.variance_ok.value());
  }
}

TEST_CASE("oracle mode uses the theta = -1 law") {
  auto c = base_config();
  c.rho_seq = FixedRho{0.3};
  c.oracle = true;
  c.m = 2000;
  c.replicates = 1000;
  const auto s = run(c);
  REQUIRE(s.theory.has_value());
  CHECK(std::get<CaseI>(s.theory->law.regime).theta == -1.0);
  CHECK(s.theory->rate == doctest::Approx(std::sqrt(2000.0)));
  CHECK(evaluate(s).all_passed());
}

TEST_CASE("rate study rows and CSV") {
  auto c = base_config();
  c.replicates = 300;
  c.m_grid = {200, 400, 800};
  c.rho_seq = PowerLaw{1.0, 0.5};
  const auto rows = rate_study(c);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.summary.m == row.m);
    CHECK(row.summary.rho_m == doctest::Approx(1.0 / std::sqrt(static_cast<double>(row.m))));
    CHECK(*row.var_sqrtm == doctest::Approx(static_cast<double>(row.m) * *row.summary.var_fdp));
    CHECK(row.summary.theory->rate == doctest::Approx(std::pow(static_cast<double>(row.m), 0.25)));
  }
  std::ostringstream os;
  write_rate_csv(os, rows);
  CHECK(os.str().rfind("m,rho_m,mean_fdp,var_fdp,var_sqrtm,var_scaled,theory_variance,variance_ratio,ks_statistic\n", 0) == 0);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("json summary fields") {
  auto c = base_config();
  c.replicates = 150;
  const auto s = run(c);
  const auto j = to_json(s, c);
  for (const char* key : {"version", "config", "m", "rho_m", "replicates", "mean_fdp", "var_fdp", "per_replicate_fdp",
                          "theory", "diagnostics"}) {
    CHECK(j.contains(key));
  }
  for (const char* key : {"regime", "theta", "rate", "rate_value", "t_star", "center", "c_T", "sigma2_T", "variance",
                          "theory_variance", "var_scaled", "mc_se_variance", "variance_ratio", "ks_statistic",
                          "scaled_deviations"}) {
    CHECK(j["theory"].contains(key));
  }
  CHECK(j["config"]["procedure"]["kind"] == "bh");
  CHECK(j["config"]["rho_sequence"]["kind"] == "theta_over_m");
  CHECK(j["replicates"] == 150);
}

TEST_CASE("e.c.d.f. covariance probe at independence") {
  const ModelParams params(2000, 0.5, 2.0, 0.0);
  const auto probe = ecdf_covariance_probe(params, {0.25, 0.5}, 1000, 3, 1, 100);
  const LimitProcessSpec spec{0.5, 2.0};
  REQUIRE(probe.covariance.size() == 4);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const double s = probe.grid[a];
      const double t = probe.grid[b];
      const auto i0 = probe.index(EcdfGroup::Null, a);
      const auto j0 = probe.index(EcdfGroup::Null, b);
      const auto i1 = probe.index(EcdfGroup::Alternative, a);
      const auto j1 = probe.index(EcdfGroup::Alternative, b);
      CHECK(probe.bootstrap_se[i0][j0] > 0.0);
      CHECK(std::fabs(probe.covariance[i0][j0] - limit_cov(spec, LimitKernel::Z0Z0, s, t)) <=
            4.0 * probe.bootstrap_se[i0][j0]);
      CHECK(std::fabs(probe.covariance[i1][j1] - limit_cov(spec, LimitKernel::Z1Z1, s, t)) <=
            4.0 * probe.bootstrap_se[i1][j1]);
    }
  }
  CHECK_THROWS_AS(ecdf_covariance_probe(params, {}, 10, 1), ParameterError);
  CHECK_THROWS_AS(ecdf_covariance_probe(params, {1.0}, 10, 1), ParameterError);
}

TEST_CASE("rate study at independence settles at the largest m") {
  auto c = base_config();
  c.replicates = 1000;
  c.seed = 31;
  c.m_grid = {1000, 4000, 16000};
  const auto rows = rate_study(c);
  const double ratio = *rows.back().summary.theory->variance_ratio;
  CHECK(ratio >= 0.85);
  CHECK(ratio <= 1.15);
}

TEST_CASE("case (ii) rate separation over three decades") {
  auto c = base_config();
  c.replicates = 1000;
  c.seed = 32;
  c.rho_seq = PowerLaw{1.0, 0.5};
  c.m_grid = {1000, 10000, 100000};
  const auto rows = rate_study(c);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double growth = *rows[i].var_sqrtm / *rows[i - 1].var_sqrtm;
    CAPTURE(i);
    CHECK(growth >= 2.4);
    CHECK(growth <= 4.0);
  }
  // variance_ratio drifts toward 1 as rho_m -> 0.
  CHECK(std::fabs(*rows.back().summary.theory->variance_ratio - 1.0) < 0.15);
}
