#include <cmath>

#include <gtest/gtest.h>

#include "nlsf/errors.hpp"
#include "nlsf/functionals.hpp"
#include "nlsf/oracle.hpp"

using namespace nlsf;

namespace {

// Independent reference: scipy solve_ivp (rtol 1e-12) with bisection on
// u(0), quadrature by Simpson on the converged profile.
constexpr double kU0Cubic3 = 4.337387679976;
constexpr double kJCubic3 = 18.89725130;
constexpr double kU0Quad4 = 8.671934299985;
constexpr double kJQuad4 = 204.42844334;

} // namespace

TEST(Oracle, CubicGroundStateInR3) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto prof = shoot(spec, 3);
  EXPECT_NEAR(prof.u0, kU0Cubic3, 1e-8);
  EXPECT_NEAR(prof.J, kJCubic3, 1e-6 * kJCubic3);
  EXPECT_LT(prof.pohozaev_residual, 1e-4);
  EXPECT_NEAR(prof.theta, 1, 1e-4);
  EXPECT_NEAR(prof.J, prof.psi / 3, 1e-6 * prof.J);
}

TEST(Oracle, SubcriticalGroundStateInR4) {
  const auto spec = truncate(NonlinearitySpec::power(1, 3, 2, 4));
  const auto prof = shoot(spec, 4);
  EXPECT_NEAR(prof.u0, kU0Quad4, 1e-7);
  EXPECT_NEAR(prof.J, kJQuad4, 1e-6 * kJQuad4);
  EXPECT_NEAR(prof.theta, 1, 1e-4);
}

// Property: the profile is positive and strictly decreasing, and its tail is
// below 1e-8.
TEST(OracleProperty, PositiveDecreasing) {
  for (const auto &spec : {truncate(NonlinearitySpec::power(1, 4, 2, 3)),
                           truncate(NonlinearitySpec::cubic_quintic(
                               1, 4, 1, 1.5, 3))}) {
    const auto prof = shoot(spec, 3);
    ASSERT_GT(prof.u.size(), 10u);
    for (std::size_t i = 0; i + 1 < prof.u.size(); ++i) {
      EXPECT_GT(prof.u[i], 0.0);
      EXPECT_LT(prof.u[i + 1], prof.u[i]);
    }
    EXPECT_LT(prof(prof.r.back()), 1e-8);
    EXPECT_LT(prof.pohozaev_residual, 1e-4);
  }
}

TEST(Oracle, BracketInvalid) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  EXPECT_THROW(shoot(spec, 3, std::make_pair(2.0, 3.0)), BracketInvalid);
  EXPECT_THROW(shoot(spec, 3, std::make_pair(6.0, 9.0)), BracketInvalid);
  EXPECT_NO_THROW(shoot(spec, 3, std::make_pair(3.0, 6.0)));
}

TEST(Oracle, ToFieldMatchesProfile) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto prof = shoot(spec, 3);
  const auto g = build_grid({SectorKind::Radial, 3, 0, false}, 16, 1024);
  const Field u = to_field(prof, g);
  EXPECT_NEAR(u.values()[0], prof.u0, 1e-12);
  EXPECT_NEAR(evaluate(u, spec).J / prof.J, 1, 5e-4);
}
