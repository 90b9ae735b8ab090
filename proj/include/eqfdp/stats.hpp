#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace eqfdp::stats {

double mean(std::span<const double> x);

/// Unbiased sample variance; requires at least two values.
double variance(std::span<const double> x);

/// Unbiased sample covariance of paired values.
double covariance(std::span<const double> x, std::span<const double> y);

/// sup_x |F_n(x) - F(x)| for a continuous reference c.d.f. F (lower-tail, i.e.
/// F(x) = P(X <= x)).
double ks_statistic(std::span<const double> x, const std::function<double(double)>& cdf);

/// KS distance to the fully specified N(0, variance).
double ks_statistic_normal(std::span<const double> x, double variance);

/// Asymptotic 1% critical value 1.63 / sqrt(n).
double ks_critical_1pct(std::size_t n);

} // namespace eqfdp::stats
