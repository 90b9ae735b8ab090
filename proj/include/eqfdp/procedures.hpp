#pragma once

#include <cstddef>
#include <span>
#include <variant>

#include "eqfdp/model.hpp"

namespace eqfdp {

/// Benjamini-Hochberg step-up at level alpha.
struct BH {
  double alpha;
};

/// Reject every p-value <= t.
struct FixedThreshold {
  double t;
};

using ThresholdProcedure = std::variant<BH, FixedThreshold>;

/// Throws ParameterError unless alpha (or t) lies in (0,1).
void validate(const ThresholdProcedure& procedure);

struct RejectionResult {
  double threshold = 0.0;
  std::size_t rejected = 0;
  std::size_t false_rejections = 0;
  double fdp = 0.0;
};

/// The i-th BH candidate threshold alpha * i / m. Every BH routine computes
/// candidates through this function so that comparisons are bit-consistent.
inline double bh_candidate(double alpha, std::size_t i, std::size_t m) {
  return alpha * static_cast<double>(i) / static_cast<double>(m);
}

/// alpha * k / m with k = max{i : p_(i) <= alpha i / m}, or 0 when no such i.
/// Equals max{t in [0,1] : G_m(t) >= t / alpha} for the empirical c.d.f. G_m.
double bh_threshold(std::span<const double> p, double alpha);

RejectionResult apply(const ThresholdProcedure& procedure, const Sample& sample);

/// Realized FDP at a fixed threshold (ties are rejected).
double fdp_at(const Sample& sample, double t);

/// Counts at threshold t, ties rejected.
RejectionResult reject_at(const Sample& sample, double t);

} // namespace eqfdp
