#include "eqfdp/root.hpp"

#include <cmath>
#include <limits>

#include "eqfdp/error.hpp"

namespace eqfdp {

RootResult find_crossing(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (!(flo > 0.0) || !(fhi < 0.0)) {
    throw NumericalError("find_crossing: f(lo) > 0 > f(hi) does not hold");
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxIter = 2000;

  RootResult out;
  double last_width = hi - lo;
  bool force_bisect = false;
  for (int iter = 1; iter <= kMaxIter; ++iter) {
    out.iterations = iter;
    const double width = hi - lo;
    if (width <= 4.0 * kEps * std::fabs(hi)) {
      break;
    }
    double x;
    if (lo > 0.0 && hi / lo > 16.0) {
      x = std::sqrt(lo) * std::sqrt(hi);
    } else if (force_bisect) {
      x = lo + 0.5 * width;
    } else {
      x = hi - fhi * (hi - lo) / (fhi - flo);
      const double margin = 1e-3 * width;
      if (!(x > lo + margin && x < hi - margin)) {
        x = lo + 0.5 * width;
      }
    }
    if (!(x > lo && x < hi)) {
      break;
    }
    const double fx = f(x);
    if (fx == 0.0) {
      lo = hi = x;
      flo = fhi = 0.0;
      break;
    }
    if (fx > 0.0) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    // Secant steps that fail to halve the bracket trigger one bisection.
    const double new_width = hi - lo;
    force_bisect = !force_bisect && new_width > 0.5 * last_width;
    last_width = new_width;
  }
  if (std::fabs(flo) <= std::fabs(fhi)) {
    out.root = lo;
    out.residual = flo;
  } else {
    out.root = hi;
    out.residual = fhi;
  }
  return out;
}

} // namespace eqfdp
