#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "eqfdp/model.hpp"
#include "eqfdp/procedures.hpp"

namespace eqfdp {

/// p-value mixture c.d.f. G(t) = pi0 t + (1 - pi0) G1(t), G1(t) = phi_upper(phi_upper_inv(t) - mu).
class MixtureCdf {
public:
  MixtureCdf(double pi0, double mu);

  double pi0() const { return pi0_; }
  double mu() const { return mu_; }

  /// Alternative c.d.f. G1; G1(0) = 0, G1(1) = 1.
  double g1(double t) const;
  /// Density of G1: exp(mu z - mu^2/2) with z = phi_upper_inv(t).
  double g1_density(double t) const;
  double operator()(double t) const;
  /// Derivative of G, pi0 + (1 - pi0) g1_density(t).
  double density(double t) const;

  /// q(t) = pi0 t / G(t), the asymptotic FDP at a fixed threshold t > 0.
  double q(double t) const;
  /// Derivative of q: pi0 (G(t) - t G'(t)) / G(t)^2.
  double q_dot(double t) const;

private:
  double pi0_;
  double mu_;
};

struct Atom {
  double location;
  double weight;
};

/// Finite signed measure sum_j w_j delta_{t_j} with locations in (0,1).
/// Atoms closer than kMergeTolerance are merged by adding weights.
class DiracMixtureMeasure {
public:
  static constexpr double kMergeTolerance = 1e-12;

  DiracMixtureMeasure() = default;

  static DiracMixtureMeasure point(double location, double weight);

  void add(double location, double weight);
  void add(const DiracMixtureMeasure& other, double scale = 1.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  double total_weight() const;

  /// sum_j w_j F(t_j)
  double integrate(const std::function<double(double)>& f) const;
  /// sum_{i,j} w_i w_j K(t_i, t_j)
  double integrate2(const std::function<double(double, double)>& kernel) const;

private:
  std::vector<Atom> atoms_;
};

/// The unique t* in (0,1) with G(t*) = t*/alpha. Residual <= 1e-12; throws
/// NumericalError when the crossing cannot be bracketed or is not unique.
double t_star_bh(const MixtureCdf& cdf, double alpha);

/// Hadamard derivative of the BH threshold functional at G: the atom
/// (1/alpha - G'(t*))^{-1} delta_{t*}. Throws DegenerateCrossingError when
/// 1/alpha - G'(t*) <= 0.
DiracMixtureMeasure bh_derivative_measure(const MixtureCdf& cdf, double alpha);

/// Threshold T(G) of a procedure at the mixture c.d.f.
double threshold_at(const MixtureCdf& cdf, const ThresholdProcedure& procedure);

/// Derivative measure of a procedure's threshold functional (empty for a
/// fixed threshold).
DiracMixtureMeasure threshold_derivative(const MixtureCdf& cdf, const ThresholdProcedure& procedure);

struct ZetaMeasures {
  DiracMixtureMeasure zeta0;
  DiracMixtureMeasure zeta1;
};

/// zeta0 = q(1-q)/t* delta_{t*} + q'(t*) pi0 T'
/// zeta1 = -q(1-q)/G1(t*) delta_{t*} + q'(t*) (1 - pi0) T'
ZetaMeasures zeta_measures(const MixtureCdf& cdf, double t_star, const DiracMixtureMeasure& t_deriv);

/// Coupling of the FDP fluctuation with the common Gaussian factor:
/// int phi(z(t)) zeta0(dt) + int phi(z(t) - mu) zeta1(dt), z = phi_upper_inv.
double c_of_T(const DiracMixtureMeasure& zeta0, const DiracMixtureMeasure& zeta1, double mu);

/// Empirical-process variance with bridge kernels min(s,t) - st and
/// G1(min(s,t)) - G1(s)G1(t).
double sigma2_of_T(const DiracMixtureMeasure& zeta0, const DiracMixtureMeasure& zeta1, const MixtureCdf& cdf);

/// m rho_m -> theta in [-1, inf): rate sqrt(m), variance sigma2 + theta c^2.
struct CaseI {
  double theta;
};

/// m rho_m -> inf, rho_m -> 0: rate rho_m^{-1/2}, variance c^2.
struct CaseII {};

using Regime = std::variant<CaseI, CaseII>;

struct AsymptoticLaw {
  Regime regime = CaseI{0.0};
  double t_star = 0.0;
  double center = 0.0;
  double c_T = 0.0;
  double sigma2_T = 0.0;
  double variance = 0.0;

  /// Scaling a_m: sqrt(m) in case (i), rho_m^{-1/2} in case (ii).
  double rate(std::size_t m, double rho_m) const;
  /// "sqrt(m)" or "rho_m^(-1/2)".
  std::string rate_description() const;
  bool is_case_i() const { return std::holds_alternative<CaseI>(regime); }
};

/// Law for an explicitly given regime.
AsymptoticLaw law_for_regime(const MixtureCdf& cdf, const ThresholdProcedure& procedure, const Regime& regime);

/// Law for a correlation sequence. FixedRho has no normal limit and throws
/// RegimeError; use oracle_law for that case.
AsymptoticLaw asymptotic_law(const MixtureCdf& cdf, const ThresholdProcedure& procedure, const RhoSequence& rho_seq);

/// Closed-form BH constants at t*: pi0 alpha^2 (1 - t*)/t* and
/// pi0^2 alpha^2 / (2 pi t*^2) exp(-z*^2).
struct BhClosedForm {
  double sigma2;
  double c2;
};
BhClosedForm bh_closed_form(double pi0, double alpha, double t_star);

/// Covariance kernels of the limit objects Z0, Z1, Z.
struct LimitProcessSpec {
  double pi0;
  double mu;
};

enum class LimitKernel { Z0Z0, Z1Z1, ZZ0, ZZ1 };

/// Z0Z0: (min(s,t) - st)/pi0. Z1Z1: (G1(min) - G1(s)G1(t))/(1-pi0).
/// ZZ0 / ZZ1: cov(Z, Z_k(t)); these depend on t only and ignore s.
double limit_cov(const LimitProcessSpec& spec, LimitKernel which, double s, double t);

enum class EcdfGroup { Null, Alternative };

/// Limit covariance of sqrt(m)(G_{a,m}(s) - G_a(s)) and sqrt(m)(G_{b,m}(t) - G_b(t))
/// in case (i), assembled from the representation Z_k + (Z - sqrt(1+theta) U) Phi'(z_k).
double ecdf_limit_cov(const LimitProcessSpec& spec, EcdfGroup a, EcdfGroup b, double theta, double s, double t);

} // namespace eqfdp
