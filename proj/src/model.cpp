#include "eqfdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "eqfdp/error.hpp"
#include "eqfdp/gauss.hpp"

namespace eqfdp {

namespace {

// Lower admissible correlation -1/(m-1), with a relative slack of a few ulps so
// that values computed as -1.0 / (m - 1) elsewhere are accepted.
double min_rho(std::size_t m) {
  return -1.0 / static_cast<double>(m - 1) * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
}

} // namespace

ModelParams::ModelParams(std::size_t m, double pi0, double mu, double rho)
    : m_(m), pi0_(pi0), mu_(mu), rho_(rho), m0_(0) {
  if (m < 2) {
    throw ParameterError("ModelParams: m must be at least 2");
  }
  if (!(pi0 > 0.0 && pi0 < 1.0)) {
    throw ParameterError("ModelParams: pi0 must lie in (0,1)");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ParameterError("ModelParams: mu must be positive and finite");
  }
  if (!std::isfinite(rho) || rho < min_rho(m) || rho > 1.0) {
    throw ParameterError("ModelParams: rho must lie in [-1/(m-1), 1], got " + std::to_string(rho));
  }
  m0_ = static_cast<std::size_t>(std::floor(static_cast<double>(m) * pi0));
  if (m0_ < 1 || m0_ > m - 1) {
    throw ParameterError("ModelParams: floor(m * pi0) must lie in [1, m-1]");
  }
}

void validate(const RhoSequence& seq) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ThetaOverM>) {
          if (!(s.theta >= -1.0) || !std::isfinite(s.theta)) {
            throw ParameterError("ThetaOverM: theta must be finite and >= -1");
          }
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          if (!(s.c > 0.0) || !std::isfinite(s.c)) {
            throw ParameterError("PowerLaw: c must be positive");
          }
          if (!(s.gamma > 0.0 && s.gamma < 1.0)) {
            throw ParameterError("PowerLaw: gamma must lie in (0,1)");
          }
        } else {
          if (!(s.rho > 0.0 && s.rho < 1.0)) {
            throw ParameterError("FixedRho: rho must lie in (0,1)");
          }
        }
      },
      seq);
}

double rho_at(const RhoSequence& seq, std::size_t m) {
  validate(seq);
  const double md = static_cast<double>(m);
  return std::visit(
      [md](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ThetaOverM>) {
          return s.theta / md;
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          return std::min(1.0, s.c * std::pow(md, -s.gamma));
        } else {
          return s.rho;
        }
      },
      seq);
}

std::mt19937_64 make_engine(RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream.seed), static_cast<std::uint32_t>(stream.seed >> 32),
                    static_cast<std::uint32_t>(stream.stream_id),
                    static_cast<std::uint32_t>(stream.stream_id >> 32)};
  return std::mt19937_64(seq);
}

double open_uniform(std::mt19937_64& engine) {
  constexpr double kScale = 0x1.0p-53;
  return (static_cast<double>(engine() >> 11) + 0.5) * kScale;
}

double standard_normal(std::mt19937_64& engine) {
  return phi_upper_inv(open_uniform(engine));
}

Sample make_sample(std::vector<bool> tau, std::vector<double> x) {
  if (tau.size() != x.size()) {
    throw ParameterError("make_sample: tau and x differ in length");
  }
  Sample s;
  s.p.resize(x.size());
  constexpr double kLo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.p[i] = std::clamp(phi_upper(x[i]), kLo, hi);
  }
  s.m0 = static_cast<std::size_t>(std::count(tau.begin(), tau.end(), false));
  s.tau = std::move(tau);
  s.x = std::move(x);
  return s;
}

Sample sample(const ModelParams& params, RngStream stream) {
  auto engine = make_engine(stream);
  const std::size_t m = params.m();
  const double md = static_cast<double>(m);
  const double rho = params.rho();

  std::vector<double> xi(m);
  double mean = 0.0;
  for (auto& v : xi) {
    v = standard_normal(engine);
    mean += v;
  }
  mean /= md;
  const double u = standard_normal(engine);

  const double idio = std::sqrt(std::max(0.0, 1.0 - rho));
  // At rho = -1/(m-1) the factor loading is exactly zero; rounding in
  // 1 + (m-1) rho would otherwise leak a ~1e-8 multiple of U.
  double loading = 1.0 + (md - 1.0) * rho;
  if (loading < 16.0 * std::numeric_limits<double>::epsilon()) {
    loading = 0.0;
  }
  const double common = std::sqrt(loading / md);

  std::vector<bool> tau(m, false);
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool alt = i >= params.m0();
    tau[i] = alt;
    x[i] = idio * (xi[i] - mean) + common * u + (alt ? params.mu() : 0.0);
  }
  return make_sample(std::move(tau), std::move(x));
}

StepFunction::StepFunction(std::vector<double> points) : sorted_(std::move(points)) {
  std::sort(sorted_.begin(), sorted_.end());
}

std::size_t StepFunction::count_at(double t) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin());
}

double StepFunction::operator()(double t) const {
  if (sorted_.empty()) {
    return 0.0;
  }
  return static_cast<double>(count_at(t)) / static_cast<double>(sorted_.size());
}

EcdfTriple ecdf_triple(const Sample& s) {
  std::vector<double> p0;
  std::vector<double> p1;
  p0.reserve(s.m0);
  p1.reserve(s.m() - s.m0);
  for (std::size_t i = 0; i < s.m(); ++i) {
    (s.tau[i] ? p1 : p0).push_back(s.p[i]);
  }
  EcdfTriple out;
  out.m0 = s.m0;
  out.m = s.m();
  out.g0 = StepFunction(std::move(p0));
  out.g1 = StepFunction(std::move(p1));
  out.g = StepFunction(s.p);
  return out;
}

void write_sample_csv(std::ostream& os, const Sample& s) {
  os << "index,tau,x,p\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < s.m(); ++i) {
    os << i << ',' << (s.tau[i] ? 1 : 0) << ',' << s.x[i] << ',' << s.p[i] << '\n';
  }
}

} // namespace eqfdp
