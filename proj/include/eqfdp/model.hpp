#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace eqfdp {

/// The equi-correlated Gaussian testing model (m, pi0, mu, rho).
///
/// Null hypotheses occupy indices [0, m0) with m0 = floor(m * pi0); the
/// remaining m - m0 coordinates carry mean shift mu. Construction validates
/// every invariant and throws ParameterError on violation.
class ModelParams {
public:
  ModelParams(std::size_t m, double pi0, double mu, double rho);

  std::size_t m() const { return m_; }
  double pi0() const { return pi0_; }
  double mu() const { return mu_; }
  double rho() const { return rho_; }
  std::size_t m0() const { return m0_; }
  std::size_t m1() const { return m_ - m0_; }

private:
  std::size_t m_;
  double pi0_;
  double mu_;
  double rho_;
  std::size_t m0_;
};

/// rho_m = theta / m. Limit m * rho_m = theta (finite regime).
struct ThetaOverM {
  double theta;
};

/// rho_m = c * m^{-gamma}, gamma in (0,1): m * rho_m -> inf, rho_m -> 0.
struct PowerLaw {
  double c;
  double gamma;
};

/// rho_m = rho for every m, rho in (0,1).
struct FixedRho {
  double rho;
};

/// How the equi-correlation evolves with the number of hypotheses.
using RhoSequence = std::variant<ThetaOverM, PowerLaw, FixedRho>;

/// Validates the sequence parameters; throws ParameterError.
void validate(const RhoSequence& seq);

/// rho_m for the given m.
double rho_at(const RhoSequence& seq, std::size_t m);

/// Identifies one reproducible random stream.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// 64-bit Mersenne Twister seeded from (seed, stream_id) through std::seed_seq,
/// both of which are fully specified by the standard.
std::mt19937_64 make_engine(RngStream stream);

/// Uniform on the open interval (0,1) built from the top 53 bits of one draw.
double open_uniform(std::mt19937_64& engine);

/// Standard normal variate by inversion of phi_upper.
double standard_normal(std::mt19937_64& engine);

/// One realization of the model.
struct Sample {
  std::vector<bool> tau; ///< true for alternatives (mean mu), false for nulls
  std::vector<double> x;
  std::vector<double> p; ///< p_i = phi_upper(x_i), clamped into (0,1)
  std::size_t m0 = 0;

  std::size_t m() const { return x.size(); }
};

/// Builds a Sample from statistics and labels; computes p-values.
Sample make_sample(std::vector<bool> tau, std::vector<double> x);

/// Draws a Sample in O(m) via the exchangeable factor representation
/// X_i = sqrt(1-rho)(xi_i - mean(xi)) + sqrt((1+(m-1)rho)/m) U + mu 1{alt}.
/// Draw order is xi_1..xi_m followed by U.
Sample sample(const ModelParams& params, RngStream stream);

/// Right-continuous empirical c.d.f. stored as sorted jump locations.
class StepFunction {
public:
  StepFunction() = default;
  explicit StepFunction(std::vector<double> points);

  /// Number of points <= t.
  std::size_t count_at(double t) const;
  /// count_at(t) / n (0 when there are no points).
  double operator()(double t) const;
  std::size_t size() const { return sorted_.size(); }
  std::span<const double> jumps() const { return sorted_; }

private:
  std::vector<double> sorted_;
};

/// Null, alternative and pooled e.c.d.f.s of the p-values.
struct EcdfTriple {
  StepFunction g0;
  StepFunction g1;
  StepFunction g;
  std::size_t m0 = 0;
  std::size_t m = 0;
};

EcdfTriple ecdf_triple(const Sample& s);

/// CSV dump with header `index,tau,x,p`.
void write_sample_csv(std::ostream& os, const Sample& s);

} // namespace eqfdp
