#pragma once

// Gaussian special functions.
//
// Convention: phi_upper is the UPPER tail P(Z >= z). The lower-tail c.d.f.
// is deliberately not exposed; write phi_upper(-z) when it is needed.

namespace eqfdp {

/// P(Z >= z) for standard normal Z. Throws DomainError on non-finite z.
double phi_upper(double z);

/// Inverse of phi_upper: the z with P(Z >= z) = t, for t in (0,1).
/// Throws DomainError otherwise.
double phi_upper_inv(double t);

/// Standard normal density (2 pi)^{-1/2} exp(-z^2/2). Positive; the derivative
/// of phi_upper is its negative.
double std_normal_density(double z);

} // namespace eqfdp
