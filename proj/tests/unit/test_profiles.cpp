#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nlsf/errors.hpp"
#include "nlsf/profiles.hpp"

using namespace nlsf;

namespace {

double sech(double x) { return 1 / std::cosh(x); }
double gauss(double x) { return std::exp(-x * x); }

const std::vector<int> kLadder{8, 16, 24, 32, 40};

SyntheticSequence two_bumps(double tail_amplitude) {
  SyntheticSequence s;
  s.axis = AxisLine::line(120, 0.0625);
  s.profiles = {[](double x) { return std::sqrt(2.0) * sech(x); },
                [](double x) { return gauss(x / 1.5); }};
  s.centers = {[](int) { return 0.0; }, [](int n) { return 1.0 * n; }};
  s.tail = gauss;
  s.tail_amplitude = tail_amplitude;
  return s;
}

} // namespace

TEST(AxisLine, Quadrature) {
  const auto ax = AxisLine::line(20, 0.01);
  EXPECT_EQ(ax.size(), 4001u);
  EXPECT_EQ(ax.index_of(0), 2000u);
  Eigen::VectorXd u(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i)
    u[static_cast<Eigen::Index>(i)] = gauss(ax.x(i));
  EXPECT_NEAR(ax.mass(u), std::sqrt(std::numbers::pi / 2), 1e-8);
  // int (2x e^{-x^2})^2 = sqrt(pi/2)
  EXPECT_NEAR(ax.dirichlet(u), std::sqrt(std::numbers::pi / 2), 1e-4);

  const auto rad = AxisLine::radial(3, 10, 0.005);
  Eigen::VectorXd v(rad.size());
  for (std::size_t i = 0; i < rad.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = gauss(rad.x(i));
  EXPECT_NEAR(rad.mass(v) / std::pow(std::numbers::pi / 2, 1.5), 1, 1e-4);
}

TEST(Profiles, SingleStationaryBumpHasNoTranslatedProfiles) {
  SyntheticSequence s;
  s.axis = AxisLine::line(60, 0.0625);
  s.profiles = {[](double x) { return sech(x); }};
  s.centers = {[](int) { return 0.0; }};
  s.tail = gauss;
  // The window cut costs sech(10) of the profile.
  const auto ps = extract(s, kLadder, 10.0);
  EXPECT_EQ(ps.recovered(), 1u);
  EXPECT_EQ(ps.profiles.size(), 1u);
  const auto err = recovery_errors(ps, s);
  ASSERT_EQ(err.size(), 1u);
  EXPECT_LT(err[0], 1e-4);
}

TEST(Profiles, TwoBumpsRecovered) {
  const auto s = two_bumps(0.01);
  const auto ps = extract(s, kLadder, 5.0);
  EXPECT_EQ(ps.recovered(), 2u);
  for (double e : recovery_errors(ps, s))
    EXPECT_LT(e, 1e-2);
  // Translated centers follow y_n = n.
  ASSERT_GE(ps.centers.size(), 2u);
  for (std::size_t k = 0; k < kLadder.size(); ++k)
    EXPECT_NEAR(ps.centers[1][k], kLadder[k], 2 * s.axis.h);
}

TEST(Profiles, Deterministic) {
  const auto s = two_bumps(0.01);
  const auto a = extract(s, kLadder, 5.0);
  const auto b = extract(s, kLadder, 5.0);
  ASSERT_EQ(a.profiles.size(), b.profiles.size());
  for (std::size_t i = 0; i < a.profiles.size(); ++i)
    EXPECT_EQ((a.profiles[i] - b.profiles[i]).norm(), 0.0);
}

TEST(Profiles, BadInputs) {
  const auto s = two_bumps(0);
  EXPECT_THROW(extract(s, {}, 5.0), ConfigError);
  EXPECT_THROW(extract(s, {16, 8}, 5.0), ConfigError);
  EXPECT_THROW(extract(s, kLadder, -1.0), ConfigError);
}

TEST(Profiles, WindowTooSmall) {
  // A wide bump cannot fit inside a window of radius 0.5.
  SyntheticSequence s;
  s.axis = AxisLine::line(120, 0.0625);
  s.profiles = {[](double x) { return gauss(x / 8); }};
  s.centers = {[](int n) { return 1.0 * n; }};
  s.tail = gauss;
  EXPECT_THROW(extract(s, kLadder, 0.5), WindowTooSmall);
}

// Without tail and with u~_0 = 0 the i = 0 row is the identity
// LHS = remainder.
TEST(Profiles, LedgerRowZeroIsTrivial) {
  SyntheticSequence s = two_bumps(0);
  s.centers[0] = [](int n) { return -1.0 * n; };
  const auto ps = extract(s, kLadder, 8.0);
  EXPECT_LT(ps.axis.mass(ps.profiles[0]), ps.mass_floor);
  const auto rows = splitting_ledger(
      ps, [](double v) { return std::pow(std::abs(v), 3); }, s);
  bool seen = false;
  for (const auto &r : rows)
    if (r.i == 0) {
      seen = true;
      EXPECT_NEAR(r.lhs, r.remainder, 1e-12 * r.lhs) << r.quantity;
      EXPECT_LT(std::abs(r.sum), 1e-6 * r.lhs);
    }
  EXPECT_TRUE(seen);
  for (const auto &r : rows) {
    EXPECT_GE(r.defect, 0.0);
    EXPECT_NEAR(r.defect, std::abs(r.lhs - r.sum - r.remainder) / r.lhs, 1e-15);
    EXPECT_LT(r.defect, 1e-3) << r.quantity << " i=" << r.i;
  }
}

TEST(Profiles, LedgerRejectsWildGrowth) {
  const auto s = two_bumps(0.01);
  const auto ps = extract(s, kLadder, 5.0);
  EXPECT_THROW(splitting_ledger(ps, [](double v) { return std::exp(v * v * v * v); },
                                s),
               ConfigError);
}

TEST(Vanishing, SpreadingTailVanishes) {
  SyntheticSequence s;
  s.axis = AxisLine::radial(3, 200, 0.05);
  s.tail = gauss;
  s.tail_amplitude = 1;
  const double p = lions_exponent(3);
  EXPECT_DOUBLE_EQ(p, 4.0);
  const auto tr = vanishing_test(
      s, {1, 2, 4, 8, 16, 32}, [p](double v) { return std::pow(std::abs(v), p); },
      1.0);
  EXPECT_TRUE(tr.vanishing);
  EXPECT_LT(tr.psi_integral.back(), 1e-3 * tr.psi_integral.front());
}

TEST(Vanishing, FixedBumpDoesNotVanish) {
  SyntheticSequence s;
  s.axis = AxisLine::line(60, 0.0625);
  s.profiles = {[](double x) { return sech(x); }};
  s.centers = {[](int) { return 0.0; }};
  s.tail = gauss;
  const auto tr = vanishing_test(
      s, {1, 2, 4, 8}, [](double v) { return std::pow(std::abs(v), 3); }, 1.0);
  EXPECT_FALSE(tr.vanishing);
}

TEST(Vanishing, QuadraticPsiRejected) {
  SyntheticSequence s;
  s.axis = AxisLine::radial(3, 100, 0.05);
  s.tail = gauss;
  s.tail_amplitude = 1;
  EXPECT_THROW(vanishing_test(s, {1, 2, 4}, [](double v) { return v * v; }, 1.0),
               ConfigError);
}

// Copies of the exact 1-D ground state of -u'' + u = u^3 have theta = 1.
TEST(Profiles, ThetaOfGroundStateCopies) {
  SyntheticSequence s;
  s.axis = AxisLine::line(120, 0.03125);
  s.profiles = {[](double x) { return std::sqrt(2.0) * sech(x); },
                [](double x) { return std::sqrt(2.0) * sech(x); }};
  s.centers = {[](int) { return 0.0; }, [](int n) { return 1.0 * n; }};
  s.tail = gauss;
  // Profiles are cut at the window edge; r = 8 keeps the jump negligible.
  const auto ps = extract(s, kLadder, 8.0);
  ASSERT_EQ(ps.recovered(), 2u);
  const auto spec = NonlinearitySpec::power(1, 4, 2, 3);
  const auto tl = theta_ledger(ps, s, spec);
  ASSERT_EQ(tl.theta.size(), 2u);
  for (double t : tl.theta)
    EXPECT_NEAR(t, 1, 1e-2);
  EXPECT_LT(tl.G1_defect, 1e-3);
  EXPECT_LT(tl.G2_excess, 1e-3);
  EXPECT_LT(tl.psi_excess, 1e-3);
}
