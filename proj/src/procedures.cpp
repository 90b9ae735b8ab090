#include "eqfdp/procedures.hpp"

#include <algorithm>
#include <vector>

#include "eqfdp/error.hpp"

namespace eqfdp {

void validate(const ThresholdProcedure& procedure) {
  std::visit(
      [](const auto& proc) {
        using T = std::decay_t<decltype(proc)>;
        if constexpr (std::is_same_v<T, BH>) {
          if (!(proc.alpha > 0.0 && proc.alpha < 1.0)) {
            throw ParameterError("BH: alpha must lie in (0,1)");
          }
        } else {
          if (!(proc.t > 0.0 && proc.t < 1.0)) {
            throw ParameterError("FixedThreshold: t must lie in (0,1)");
          }
        }
      },
      procedure);
}

double bh_threshold(std::span<const double> p, double alpha) {
  if (p.empty()) {
    throw ParameterError("bh_threshold: empty p-value vector");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("bh_threshold: alpha must lie in (0,1)");
  }
  std::vector<double> sorted(p.begin(), p.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  for (std::size_t k = m; k >= 1; --k) {
    const double cand = bh_candidate(alpha, k, m);
    if (sorted[k - 1] <= cand) {
      return cand;
    }
  }
  return 0.0;
}

RejectionResult reject_at(const Sample& sample, double t) {
  RejectionResult r;
  r.threshold = t;
  for (std::size_t i = 0; i < sample.m(); ++i) {
    if (sample.p[i] <= t) {
      ++r.rejected;
      if (!sample.tau[i]) {
        ++r.false_rejections;
      }
    }
  }
  r.fdp = r.rejected == 0 ? 0.0
                          : static_cast<double>(r.false_rejections) / static_cast<double>(r.rejected);
  return r;
}

RejectionResult apply(const ThresholdProcedure& procedure, const Sample& sample) {
  validate(procedure);
  const double t = std::visit(
      [&](const auto& proc) -> double {
        using T = std::decay_t<decltype(proc)>;
        if constexpr (std::is_same_v<T, BH>) {
          return bh_threshold(sample.p, proc.alpha);
        } else {
          return proc.t;
        }
      },
      procedure);
  return reject_at(sample, t);
}

double fdp_at(const Sample& sample, double t) {
  return reject_at(sample, t).fdp;
}

} // namespace eqfdp
