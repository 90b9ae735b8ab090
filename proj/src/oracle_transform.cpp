#include "eqfdp/oracle_transform.hpp"

#include <cmath>

#include "eqfdp/error.hpp"

namespace eqfdp {

namespace {

void require_fixed_rho(const ModelParams& base) {
  if (!(base.rho() > 0.0 && base.rho() < 1.0)) {
    throw ParameterError("oracle transform: rho must lie in (0,1)");
  }
}

} // namespace

OracleParams::OracleParams(ModelParams base) : base_(base) {
  require_fixed_rho(base_);
}

double OracleParams::mu_tilde() const {
  return base_.mu() / std::sqrt(1.0 - base_.rho());
}

double OracleParams::rho_tilde() const {
  return -1.0 / static_cast<double>(base_.m() - 1);
}

double OracleParams::scale() const {
  const double m = static_cast<double>(base_.m());
  return std::sqrt(m / ((m - 1.0) * (1.0 - base_.rho())));
}

ModelParams OracleParams::transformed_model() const {
  return ModelParams(base_.m(), base_.pi0(), mu_tilde_m(), rho_tilde());
}

Sample transform(const Sample& sample, const OracleParams& params) {
  if (sample.m() != params.base().m()) {
    throw ParameterError("transform: sample size differs from the model's m");
  }
  double mean = 0.0;
  for (double v : sample.x) {
    mean += v;
  }
  mean /= static_cast<double>(sample.m());

  const double shift = (1.0 - params.base().pi0()) * params.base().mu() - mean;
  const double scale = params.scale();
  std::vector<double> x(sample.m());
  for (std::size_t i = 0; i < sample.m(); ++i) {
    x[i] = scale * (sample.x[i] + shift);
  }
  return make_sample(sample.tau, std::move(x));
}

double t_star_rho(const ModelParams& base, double alpha) {
  const OracleParams op(base);
  return t_star_bh(MixtureCdf(base.pi0(), op.mu_tilde()), alpha);
}

AsymptoticLaw oracle_law(const ModelParams& base, double alpha) {
  const OracleParams op(base);
  const double t = t_star_rho(base, alpha);
  const auto closed = bh_closed_form(base.pi0(), alpha, t);
  const double closed_variance = closed.sigma2 - closed.c2;

  AsymptoticLaw law = oracle_law(base, ThresholdProcedure{BH{alpha}});
  const double denom = std::max(std::fabs(closed_variance), std::fabs(law.variance));
  if (std::fabs(law.variance - closed_variance) > 1e-10 * denom) {
    throw NumericalError("oracle_law: generic pipeline disagrees with the closed form");
  }
  return law;
}

AsymptoticLaw oracle_law(const ModelParams& base, const ThresholdProcedure& procedure) {
  const OracleParams op(base);
  return law_for_regime(MixtureCdf(base.pi0(), op.mu_tilde()), procedure, CaseI{-1.0});
}

} // namespace eqfdp
