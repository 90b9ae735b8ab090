#include "eqfdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "eqfdp/error.hpp"
#include "eqfdp/gauss.hpp"

namespace eqfdp::stats {

double mean(std::span<const double> x) {
  if (x.empty()) {
    throw ParameterError("mean: empty input");
  }
  double s = 0.0;
  for (double v : x) {
    s += v;
  }
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  return covariance(x, x);
}

double covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("covariance: need two equally sized inputs with at least two values");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += (x[i] - mx) * (y[i] - my);
  }
  return s / static_cast<double>(x.size() - 1);
}

double ks_statistic(std::span<const double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) {
    throw ParameterError("ks_statistic: empty input");
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    d = std::max({d, above - f, f - below});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_statistic_normal(std::span<const double> x, double variance) {
  if (!(variance > 0.0)) {
    throw ParameterError("ks_statistic_normal: variance must be positive");
  }
  const double sd = std::sqrt(variance);
  return ks_statistic(x, [sd](double v) { return phi_upper(-v / sd); });
}

double ks_critical_1pct(std::size_t n) {
  return 1.63 / std::sqrt(static_cast<double>(n));
}

} // namespace eqfdp::stats
