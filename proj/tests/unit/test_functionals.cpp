#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nlsf/errors.hpp"
#include "nlsf/functionals.hpp"
#include "nlsf/symmetry.hpp"

using namespace nlsf;

namespace {

const SymmetrySector kRadial3{SectorKind::Radial, 3, 0, false};
const SymmetrySector kO2Tau4{SectorKind::TriradialO2, 4, 2, true};

Field bump(const GridPtr &g, double amp, double width) {
  return sample_radial(
      g, [=](double r) { return amp * std::exp(-r * r / (width * width)); });
}

Field random_smooth(const GridPtr &g, std::mt19937 &rng) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> c(0.5, 4);
  Field f(g);
  for (int k = 0; k < 4; ++k) {
    const double a = n01(rng), r0 = c(rng), w = c(rng) / 2;
    f += sample(g, [=](std::span<const double> x) {
      double s = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        s += (x[i] - (i == 0 ? r0 : 0)) * (x[i] - (i == 0 ? r0 : 0));
      return a * std::exp(-s / (w * w));
    });
  }
  return f;
}

} // namespace

TEST(Functionals, EvaluateIdentities) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto g = build_grid(kRadial3, 12, 256);
  const Field u = bump(g, 3, 1.5);
  const auto s = evaluate(u, spec);
  EXPECT_NEAR(s.J, 0.5 * s.psi - s.intG, 1e-12 * std::abs(s.J));
  EXPECT_NEAR(s.M, s.psi - 6 * s.intG, 1e-12 * s.psi);
  EXPECT_NEAR(s.intG1 - s.intG2, s.intG, 1e-10 * std::abs(s.intG));
  ASSERT_TRUE(s.r_of_u);
  EXPECT_NEAR(*s.r_of_u, std::sqrt(6 * s.intG / s.psi), 1e-12);
}

TEST(Functionals, NotInP) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto g = build_grid(kRadial3, 12, 128);
  const Field small = bump(g, 0.1, 1);
  EXPECT_FALSE(evaluate(small, spec).r_of_u);
  EXPECT_THROW(retraction_radius(small, spec), NotInP);
  EXPECT_THROW(retract(small, spec), NotInP);
}

TEST(Functionals, RetractLandsOnPohozaevSet) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto g = build_grid(kRadial3, 20, 512);
  const Field u = bump(g, 3, 1.5);
  const auto exact = evaluate(retract_exact(u, spec), spec);
  EXPECT_LT(std::abs(exact.M) / exact.psi, 1e-12);
  const auto interp = evaluate(retract(u, spec), spec);
  EXPECT_LT(std::abs(interp.M) / interp.psi, 2e-3);
  EXPECT_NEAR(phi(u, spec), exact.J, 1e-12 * exact.J);
}

TEST(Functionals, InvertMNormalizesDirichlet) {
  const auto g = build_grid(kRadial3, 20, 512);
  const Field u = bump(g, 0.3, 1.2);
  EXPECT_NEAR(psi(invert_m(u)), 1, 2e-3);
}

TEST(Functionals, GradientOffSphereRejected) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto g = build_grid(kRadial3, 12, 128);
  const Field u = bump(g, 3, 1.5);
  EXPECT_THROW(gradient_JM(u, spec), NotInU);
}

// Property: Phi is invariant under exact dilation.
TEST(FunctionalsProperty, PhiDilationInvariant) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto g = build_grid(kRadial3, 12, 256);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> L(0.3, 3);
  const Field u = bump(g, 3, 1.5);
  for (int i = 0; i < 10; ++i) {
    const double lam = L(rng);
    EXPECT_NEAR(phi(dilate(u, lam), spec), phi(u, spec),
                1e-12 * phi(u, spec));
  }
}

// Gradient against central differences of Phi along 10 random tangent
// directions: agreement within max(1e-6, 1e-4 |value|).
TEST(FunctionalsProperty, GradientMatchesFiniteDifferences) {
  struct Case {
    SymmetrySector sector;
    std::size_t nodes;
    NonlinearitySpec spec;
  };
  const std::vector<Case> cases = {
      {kRadial3, 256, truncate(NonlinearitySpec::power(1, 4, 2, 3))},
      {kO2Tau4, 48, truncate(NonlinearitySpec::power(1, 3, 2, 4))}};
  std::mt19937 rng(2024);
  for (const auto &c : cases) {
    const auto g = build_grid(c.sector, 10, c.nodes);
    Field u = c.sector.tau_antisym ? initializer(g, c.spec, 2.0)
                                   : bump(g, 3, 1.5);
    u = u + 0.1 * (c.sector.tau_antisym ? project_tau(random_smooth(g, rng))
                                        : random_smooth(g, rng));
    const auto tg = tangent_gradient(u, c.spec);
    for (int k = 0; k < 10; ++k) {
      Field v = project_tangent(u, random_smooth(g, rng));
      v *= 1 / h1_norm(v);
      const double eps = 1e-4;
      const double fd =
          (phi(u + eps * v, c.spec) - phi(u - eps * v, c.spec)) / (2 * eps);
      const double an = g->h1(tg.grad.values(), v.values());
      EXPECT_NEAR(an, fd, std::max(1e-6, 1e-4 * std::abs(fd)))
          << "sector " << to_string(c.sector.kind) << " direction " << k;
    }
  }
}

TEST(Functionals, ThetaOfScaledBump) {
  // theta(u) = int g(u) u / psi, checked against direct quadrature.
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto g = build_grid(kRadial3, 12, 256);
  const Field u = bump(g, 2, 1);
  double gu = 0;
  for (std::size_t p = 0; p < g->size(); ++p) {
    const double x = u.values()[static_cast<Eigen::Index>(p)];
    gu += g->weights()[static_cast<Eigen::Index>(p)] * spec.g(x) * x;
  }
  EXPECT_NEAR(theta(u, spec), gu / psi(u), 1e-12);
}
