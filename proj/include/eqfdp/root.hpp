#pragma once

#include <functional>

namespace eqfdp {

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Root of a continuous f on [lo, hi] with f(lo) > 0 > f(hi).
///
/// Bisection safeguarded secant. When the bracket spans more than a factor 16
/// (lo > 0) the bisection step is taken in log space so roots many decades
/// below 1 are resolved to full relative precision. Iterates until the bracket
/// is a few ulps wide. Throws NumericalError if the signs do not bracket.
RootResult find_crossing(const std::function<double(double)>& f, double lo, double hi);

} // namespace eqfdp
