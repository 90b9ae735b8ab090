#include "eqfdp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eqfdp/error.hpp"
#include "eqfdp/gauss.hpp"
#include "eqfdp/root.hpp"

namespace eqfdp {

MixtureCdf::MixtureCdf(double pi0, double mu) : pi0_(pi0), mu_(mu) {
  if (!(pi0 > 0.0 && pi0 < 1.0)) {
    throw ParameterError("MixtureCdf: pi0 must lie in (0,1)");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ParameterError("MixtureCdf: mu must be positive and finite");
  }
}

double MixtureCdf::g1(double t) const {
  if (t <= 0.0) {
    return 0.0;
  }
  if (t >= 1.0) {
    return 1.0;
  }
  return phi_upper(phi_upper_inv(t) - mu_);
}

double MixtureCdf::g1_density(double t) const {
  if (!(t > 0.0 && t < 1.0)) {
    throw DomainError("MixtureCdf::g1_density: t must lie in (0,1)");
  }
  const double z = phi_upper_inv(t);
  return std::exp(mu_ * z - 0.5 * mu_ * mu_);
}

double MixtureCdf::operator()(double t) const {
  const double tc = std::clamp(t, 0.0, 1.0);
  return pi0_ * tc + (1.0 - pi0_) * g1(tc);
}

double MixtureCdf::density(double t) const {
  return pi0_ + (1.0 - pi0_) * g1_density(t);
}

double MixtureCdf::q(double t) const {
  if (!(t > 0.0)) {
    throw DomainError("MixtureCdf::q: t must be positive");
  }
  return pi0_ * t / (*this)(t);
}

double MixtureCdf::q_dot(double t) const {
  const double g = (*this)(t);
  return pi0_ * (g - t * density(t)) / (g * g);
}

DiracMixtureMeasure DiracMixtureMeasure::point(double location, double weight) {
  DiracMixtureMeasure m;
  m.add(location, weight);
  return m;
}

void DiracMixtureMeasure::add(double location, double weight) {
  if (!(location > 0.0 && location < 1.0)) {
    throw ParameterError("DiracMixtureMeasure: atom location must lie in (0,1)");
  }
  for (auto& a : atoms_) {
    if (std::fabs(a.location - location) < kMergeTolerance) {
      a.weight += weight;
      return;
    }
  }
  atoms_.push_back({location, weight});
}

void DiracMixtureMeasure::add(const DiracMixtureMeasure& other, double scale) {
  for (const auto& a : other.atoms_) {
    add(a.location, scale * a.weight);
  }
}

double DiracMixtureMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    s += a.weight;
  }
  return s;
}

double DiracMixtureMeasure::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    s += a.weight * f(a.location);
  }
  return s;
}

double DiracMixtureMeasure::integrate2(const std::function<double(double, double)>& kernel) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    for (const auto& b : atoms_) {
      s += a.weight * b.weight * kernel(a.location, b.location);
    }
  }
  return s;
}

double t_star_bh(const MixtureCdf& cdf, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("t_star_bh: alpha must lie in (0,1)");
  }
  const auto h = [&](double t) { return cdf(t) - t / alpha; };

  // h > 0 near 0 because t / G(t) -> 0; for small mu or alpha the crossing can
  // sit many decades below 1e-14, so the lower end is pushed down until h > 0.
  double lo = 1e-14;
  while (!(h(lo) > 0.0)) {
    lo *= 1e-8;
    if (lo < 1e-300) {
      throw NumericalError("t_star_bh: could not bracket the fixed point from below");
    }
  }
  const double hi = 1.0 - 1e-14;
  const RootResult r = find_crossing(h, lo, hi);
  if (!(std::fabs(r.residual) <= 1e-12)) {
    throw NumericalError("t_star_bh: residual above 1e-12");
  }
  const double t = r.root;

  // h is positive left of t* and negative right of it.
  constexpr int kGrid = 64;
  for (int k = 1; k <= kGrid; ++k) {
    const double left = t * static_cast<double>(k) / (kGrid + 1);
    const double right = t + (1.0 - t) * static_cast<double>(k) / (kGrid + 1);
    if (!(h(left) > 0.0) || !(h(right) < 0.0)) {
      throw NumericalError("t_star_bh: crossing of G(t) and t/alpha is not unique");
    }
  }
  return t;
}

DiracMixtureMeasure bh_derivative_measure(const MixtureCdf& cdf, double alpha) {
  const double t = t_star_bh(cdf, alpha);
  const double gap = 1.0 / alpha - cdf.density(t);
  if (!(gap > 0.0)) {
    throw DegenerateCrossingError("bh_derivative_measure: 1/alpha - G'(t*) <= 0, threshold is not differentiable");
  }
  return DiracMixtureMeasure::point(t, 1.0 / gap);
}

double threshold_at(const MixtureCdf& cdf, const ThresholdProcedure& procedure) {
  validate(procedure);
  if (const auto* bh = std::get_if<BH>(&procedure)) {
    return t_star_bh(cdf, bh->alpha);
  }
  return std::get<FixedThreshold>(procedure).t;
}

DiracMixtureMeasure threshold_derivative(const MixtureCdf& cdf, const ThresholdProcedure& procedure) {
  validate(procedure);
  if (const auto* bh = std::get_if<BH>(&procedure)) {
    return bh_derivative_measure(cdf, bh->alpha);
  }
  return {};
}

ZetaMeasures zeta_measures(const MixtureCdf& cdf, double t_star, const DiracMixtureMeasure& t_deriv) {
  if (!(t_star > 0.0 && t_star < 1.0)) {
    throw ParameterError("zeta_measures: t_star must lie in (0,1)");
  }
  const double q = cdf.q(t_star);
  const double qd = cdf.q_dot(t_star);
  const double spread = q * (1.0 - q);

  ZetaMeasures z;
  z.zeta0.add(t_star, spread / t_star);
  z.zeta0.add(t_deriv, qd * cdf.pi0());
  z.zeta1.add(t_star, -spread / cdf.g1(t_star));
  z.zeta1.add(t_deriv, qd * (1.0 - cdf.pi0()));
  return z;
}

double c_of_T(const DiracMixtureMeasure& zeta0, const DiracMixtureMeasure& zeta1, double mu) {
  const double null_part = zeta0.integrate([](double t) { return std_normal_density(phi_upper_inv(t)); });
  const double alt_part = zeta1.integrate([mu](double t) { return std_normal_density(phi_upper_inv(t) - mu); });
  return null_part + alt_part;
}

double sigma2_of_T(const DiracMixtureMeasure& zeta0, const DiracMixtureMeasure& zeta1, const MixtureCdf& cdf) {
  const auto k0 = [](double s, double t) { return std::min(s, t) - s * t; };
  const auto k1 = [&cdf](double s, double t) { return cdf.g1(std::min(s, t)) - cdf.g1(s) * cdf.g1(t); };
  const double v0 = zeta0.integrate2(k0) / cdf.pi0();
  const double v1 = zeta1.integrate2(k1) / (1.0 - cdf.pi0());
  const double v = v0 + v1;

  const double scale = std::max(1.0, std::fabs(v0) + std::fabs(v1));
  if (v < -1e-10 * scale) {
    throw NumericalError("sigma2_of_T: negative variance from a positive semidefinite kernel");
  }
  return std::max(v, 0.0);
}

double AsymptoticLaw::rate(std::size_t m, double rho_m) const {
  if (is_case_i()) {
    return std::sqrt(static_cast<double>(m));
  }
  if (!(rho_m > 0.0)) {
    throw ParameterError("AsymptoticLaw::rate: case (ii) needs rho_m > 0");
  }
  return 1.0 / std::sqrt(rho_m);
}

std::string AsymptoticLaw::rate_description() const {
  return is_case_i() ? "sqrt(m)" : "rho_m^(-1/2)";
}

AsymptoticLaw law_for_regime(const MixtureCdf& cdf, const ThresholdProcedure& procedure, const Regime& regime) {
  AsymptoticLaw law;
  law.regime = regime;
  law.t_star = threshold_at(cdf, procedure);
  law.center = cdf.q(law.t_star);
  const auto deriv = threshold_derivative(cdf, procedure);
  const auto zeta = zeta_measures(cdf, law.t_star, deriv);
  law.c_T = c_of_T(zeta.zeta0, zeta.zeta1, cdf.mu());
  law.sigma2_T = sigma2_of_T(zeta.zeta0, zeta.zeta1, cdf);

  const double c2 = law.c_T * law.c_T;
  if (const auto* ci = std::get_if<CaseI>(&regime)) {
    if (!(ci->theta >= -1.0)) {
      throw ParameterError("law_for_regime: theta must be >= -1");
    }
    const double v = law.sigma2_T + ci->theta * c2;
    if (v < -1e-10 * std::max(1.0, law.sigma2_T)) {
      throw NumericalError("law_for_regime: sigma2 + theta c^2 is negative");
    }
    law.variance = std::max(v, 0.0);
  } else {
    law.variance = c2;
  }
  return law;
}

AsymptoticLaw asymptotic_law(const MixtureCdf& cdf, const ThresholdProcedure& procedure, const RhoSequence& rho_seq) {
  validate(rho_seq);
  if (const auto* t = std::get_if<ThetaOverM>(&rho_seq)) {
    return law_for_regime(cdf, procedure, CaseI{t->theta});
  }
  if (std::holds_alternative<PowerLaw>(rho_seq)) {
    return law_for_regime(cdf, procedure, CaseII{});
  }
  throw RegimeError(
      "asymptotic_law: fixed rho in (0,1) has no normal limit; the FDP does not concentrate around the FDR. "
      "Use the oracle transform for this regime.");
}

BhClosedForm bh_closed_form(double pi0, double alpha, double t_star) {
  const double z = phi_upper_inv(t_star);
  const double pa = pi0 * alpha;
  return {pi0 * alpha * alpha * (1.0 - t_star) / t_star,
          pa * pa / (2.0 * std::numbers::pi * t_star * t_star) * std::exp(-z * z)};
}

double limit_cov(const LimitProcessSpec& spec, LimitKernel which, double s, double t) {
  if (!(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0)) {
    throw DomainError("limit_cov: s and t must lie in (0,1)");
  }
  switch (which) {
  case LimitKernel::Z0Z0:
    return (std::min(s, t) - s * t) / spec.pi0;
  case LimitKernel::Z1Z1: {
    const MixtureCdf cdf(spec.pi0, spec.mu);
    return (cdf.g1(std::min(s, t)) - cdf.g1(s) * cdf.g1(t)) / (1.0 - spec.pi0);
  }
  case LimitKernel::ZZ0:
    return std_normal_density(phi_upper_inv(t));
  case LimitKernel::ZZ1:
    return std_normal_density(phi_upper_inv(t) - spec.mu);
  }
  throw DomainError("limit_cov: unknown kernel");
}

double ecdf_limit_cov(const LimitProcessSpec& spec, EcdfGroup a, EcdfGroup b, double theta, double s, double t) {
  if (!(theta >= -1.0)) {
    throw ParameterError("ecdf_limit_cov: theta must be >= -1");
  }
  const auto cross_kernel = [](EcdfGroup g) { return g == EcdfGroup::Null ? LimitKernel::ZZ0 : LimitKernel::ZZ1; };
  // Phi' = -density under the upper-tail convention.
  const double dphi_a = -limit_cov(spec, cross_kernel(a), s, s);
  const double dphi_b = -limit_cov(spec, cross_kernel(b), t, t);

  double bridge = 0.0;
  if (a == b) {
    bridge = limit_cov(spec, a == EcdfGroup::Null ? LimitKernel::Z0Z0 : LimitKernel::Z1Z1, s, t);
  }
  // var(Z - sqrt(1+theta) U) = 2 + theta; cov(Z_k(x), Z - sqrt(1+theta) U) = cov(Z, Z_k(x)).
  return bridge + dphi_a * limit_cov(spec, cross_kernel(b), t, t) + dphi_b * limit_cov(spec, cross_kernel(a), s, s) +
         (2.0 + theta) * dphi_a * dphi_b;
}

} // namespace eqfdp
