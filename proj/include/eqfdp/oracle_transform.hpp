#pragma once

#include "eqfdp/asymptotics.hpp"
#include "eqfdp/model.hpp"

namespace eqfdp {

/// Model with a fixed correlation rho in (0,1) whose parameters are known
/// exactly. Re-standardizing the statistics yields an equi-correlation of
/// -1/(m-1) and restores sqrt(m) concentration of the BH FDP.
class OracleParams {
public:
  /// Throws ParameterError unless base.rho() lies in (0,1).
  explicit OracleParams(ModelParams base);

  const ModelParams& base() const { return base_; }
  /// Limiting shift mu (1 - rho)^{-1/2}.
  double mu_tilde() const;
  /// -1/(m-1)
  double rho_tilde() const;
  /// sqrt(m / ((m-1)(1-rho))), > 1.
  double scale() const;
  /// Exact per-m shift of the transformed alternatives, scale() * mu.
  double mu_tilde_m() const { return scale() * base_.mu(); }
  /// The model the transformed statistics follow exactly.
  ModelParams transformed_model() const;

private:
  ModelParams base_;
};

/// x~_i = scale (x_i - mean(x) + (1 - pi0) mu); p~_i = phi_upper(x~_i); tau unchanged.
Sample transform(const Sample& sample, const OracleParams& params);

/// Fixed point of pi0 t + (1 - pi0) phi_upper(phi_upper_inv(t) - mu~) = t/alpha.
double t_star_rho(const ModelParams& base, double alpha);

/// Limit of sqrt(m)(FDP~ - pi0 alpha): case (i) with theta = -1 under the
/// mu~-mixture. The closed form pi0 a^2 (1-t)/t - pi0^2 a^2/(2 pi t^2) exp(-z^2)
/// is checked against the generic pipeline; disagreement beyond 1e-10 relative
/// throws NumericalError.
AsymptoticLaw oracle_law(const ModelParams& base, double alpha);

/// Generic-pipeline law for any procedure applied to transformed p-values.
AsymptoticLaw oracle_law(const ModelParams& base, const ThresholdProcedure& procedure);

} // namespace eqfdp
