#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "eqfdp/error.hpp"
#include "eqfdp/gauss.hpp"
#include "oracle_values.hpp"

using namespace eqfdp;

namespace {

double rel_err(double got, double want) {
  if (want == 0.0) {
    return std::fabs(got);
  }
  return std::fabs(got - want) / std::fabs(want);
}

} // namespace

TEST_CASE("phi_upper matches the high-precision table") {
  for (const auto& [z, want] : oracle::kPhiUpper) {
    CAPTURE(z);
    CHECK(rel_err(phi_upper(z), want) <= 1e-10);
  }
}

TEST_CASE("phi_upper basic values") {
  CHECK(phi_upper(0.0) == 0.5);
  CHECK(phi_upper(40.0) < 1e-300);
  CHECK(phi_upper(-40.0) == 1.0);
  CHECK(rel_err(phi_upper(1.0), 0.158655253931457) < 1e-14);
}

TEST_CASE("phi_upper rejects non-finite input") {
  CHECK_THROWS_AS(phi_upper(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(phi_upper(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("phi_upper_inv matches the high-precision table") {
  for (const auto& [t, want] : oracle::kPhiUpperInv) {
    CAPTURE(t);
    const double z = phi_upper_inv(t);
    CHECK(std::fabs(z - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
    CHECK(std::fabs(phi_upper(z) - t) <= 1e-12 * std::max(t, 1.0 - t));
    CHECK(rel_err(phi_upper(z), t) <= 1e-10);
  }
}

TEST_CASE("phi_upper_inv spec examples") {
  CHECK(phi_upper_inv(0.5) == 0.0);
  CHECK(std::fabs(phi_upper_inv(0.158655253931457) - 1.0) < 1e-10);
  CHECK(std::fabs(phi_upper_inv(0.05) - 1.6448536269514722) < 1e-14);
}

TEST_CASE("phi_upper_inv domain errors") {
  CHECK_THROWS_AS(phi_upper_inv(0.0), DomainError);
  CHECK_THROWS_AS(phi_upper_inv(1.0), DomainError);
  CHECK_THROWS_AS(phi_upper_inv(-0.1), DomainError);
  CHECK_THROWS_AS(phi_upper_inv(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("std_normal_density") {
  CHECK(std_normal_density(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(rel_err(std_normal_density(1.0), oracle::kDensityAt1) <= 1e-14);
  CHECK(rel_err(std_normal_density(2.5), oracle::kDensityAt2_5) <= 1e-14);
  CHECK(std_normal_density(1.7) == std_normal_density(-1.7));
}

TEST_CASE("properties on random arguments") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> zdist(-8.0, 8.0);
  std::uniform_real_distribution<double> logt(-300.0, -1e-3);
  for (int i = 0; i < 5000; ++i) {
    const double z = zdist(rng);
    CHECK(std::fabs(phi_upper(z) + phi_upper(-z) - 1.0) <= 1e-12);
    // phi_upper(z) sits within a few ulps of 1 for z < -5.5, so the z round
    // trip is limited by conditioning there: |dz| ~ ulp(1) / density(z).
    const double roundtrip_tol =
        z >= -5.5 ? 1e-8 : 4.0 * std::numeric_limits<double>::epsilon() / std_normal_density(z);
    CHECK(std::fabs(phi_upper_inv(phi_upper(z)) - z) <= roundtrip_tol);

    const double z2 = z + std::fabs(zdist(rng)) * 0.1 + 1e-6;
    CHECK(phi_upper(z) > phi_upper(z2));

    const double t = std::pow(10.0, logt(rng));
    CHECK(rel_err(phi_upper(phi_upper_inv(t)), t) <= 1e-10);
    if (1.0 - t < 1.0) {
      CHECK(rel_err(phi_upper(phi_upper_inv(1.0 - t)), 1.0 - t) <= 1e-10);
    }
  }
}
