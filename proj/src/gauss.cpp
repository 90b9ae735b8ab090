#include "eqfdp/gauss.hpp"

#include <cmath>
#include <numbers>

#include "eqfdp/error.hpp"

namespace eqfdp {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684759;

// Wichura's AS 241 (PPND16) for the lower-tail quantile, restricted to
// p in (0, 0.5]. Returns a value <= 0.
double lower_quantile_as241(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = std::sqrt(-std::log(p));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return -val;
}

// Upper-tail quantile for s in (0, 0.5]; the result is >= 0.
double upper_quantile_small(double s) {
  double z = -lower_quantile_as241(s);
  // One Halley step on f(z) = phi_upper(z) - s. f' = -density, f'' = z * density.
  const double dens = std_normal_density(z);
  if (dens > 0.0) {
    const double u = (phi_upper(z) - s) / dens;
    z += u / (1.0 - 0.5 * z * u);
  }
  return z;
}

} // namespace

double phi_upper(double z) {
  if (!std::isfinite(z)) {
    throw DomainError("phi_upper: argument must be finite");
  }
  return 0.5 * std::erfc(z * std::numbers::sqrt2 * 0.5);
}

double phi_upper_inv(double t) {
  if (!(t > 0.0 && t < 1.0)) {
    throw DomainError("phi_upper_inv: probability must lie in (0,1)");
  }
  if (t == 0.5) {
    return 0.0;
  }
  if (t < 0.5) {
    return upper_quantile_small(t);
  }
  // 1 - t is exact for t in [0.5, 1).
  return -upper_quantile_small(1.0 - t);
}

double std_normal_density(double z) {
  if (!std::isfinite(z)) {
    throw DomainError("std_normal_density: argument must be finite");
  }
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

} // namespace eqfdp
