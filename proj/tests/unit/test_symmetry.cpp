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

NonlinearitySpec subcritical4() {
  return truncate(NonlinearitySpec::power(1, 3, 2, 4));
}

} // namespace

TEST(Symmetry, OddCutoff) {
  EXPECT_EQ(odd_cutoff(0), 0.0);
  EXPECT_EQ(odd_cutoff(1), 1.0);
  EXPECT_EQ(odd_cutoff(-3), -1.0);
  EXPECT_DOUBLE_EQ(odd_cutoff(0.4), -odd_cutoff(-0.4));
  // C1 at |t| = 1: (15 - 30 t^2 + 15 t^4) / 8 vanishes there.
  EXPECT_NEAR((odd_cutoff(1) - odd_cutoff(1 - 1e-6)) / 1e-6, 0, 1e-5);
}

TEST(Symmetry, TauProjectionRejectsRadial) {
  const auto g = build_grid(kRadial3, 5, 32);
  EXPECT_THROW(project_tau(Field(g)), ConfigError);
}

// Property: the tau projection is idempotent and yields u(tau x) = -u(x).
TEST(SymmetryProperty, TauProjection) {
  const auto g = build_grid(kO2Tau4, 5, 24);
  std::mt19937 rng(1);
  std::normal_distribution<double> n01;
  const auto &perm = g->tau_permutation();
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd v(g->size());
    for (auto &x : v)
      x = n01(rng);
    const Field p = project_tau(Field(g, v));
    const Field pp = project_tau(p);
    EXPECT_LT((pp.values() - p.values()).norm(), 1e-14);
    for (std::size_t i = 0; i < g->size(); ++i)
      EXPECT_EQ(p.values()[static_cast<Eigen::Index>(i)],
                -p.values()[static_cast<Eigen::Index>(perm[i])]);
  }
}

TEST(Symmetry, InitializerIsInPAndAntisymmetric) {
  const auto spec = subcritical4();
  const auto g = build_grid(kO2Tau4, 16, 64);
  const Field u = initializer(g, spec, 1.0);
  EXPECT_GT(integral_G(u, spec), 0);
  EXPECT_LT((project_tau(u).values() - u.values()).norm(), 1e-12);
  EXPECT_THROW(initializer(build_grid(kRadial3, 16, 64), spec, 1.0),
               ConfigError);
}

TEST(Symmetry, InitializerNeedsRoom) {
  const auto spec = subcritical4();
  const auto g = build_grid(kO2Tau4, 2, 32);
  EXPECT_THROW(initializer(g, spec, 0.1), PositivityUnreachable);
}

TEST(Symmetry, DefaultSeedRadial) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  const auto g = build_grid(kRadial3, 16, 128);
  EXPECT_GT(integral_G(default_seed(g, spec, 1.0), spec), 0);
}

// Property: the sphere family is odd, sigma on the unit sphere, 3^k - 1
// samples, and the field is a combination of disjoint shells at +-xi0.
TEST(SymmetryProperty, SphereFamilyIsOdd) {
  const auto spec = subcritical4();
  const auto g = build_grid(kO2Tau4, 18, 48);
  for (int k : {1, 2, 3}) {
    const auto fam = sphere_family(k, g, spec);
    ASSERT_EQ(fam.size(), static_cast<std::size_t>(std::pow(3, k)) - 1);
    for (std::size_t i = 0; i < fam.size(); i += 2) {
      double n2 = 0;
      for (std::size_t j = 0; j < fam[i].sigma.size(); ++j) {
        n2 += fam[i].sigma[j] * fam[i].sigma[j];
        EXPECT_EQ(fam[i].sigma[j], -fam[i + 1].sigma[j]);
      }
      EXPECT_NEAR(n2, 1, 1e-14);
      EXPECT_EQ((fam[i].field.values() + fam[i + 1].field.values()).norm(),
                0.0);
      EXPECT_LE(fam[i].field.values().cwiseAbs().maxCoeff(),
                spec.xi0() + 1e-12);
    }
  }
  EXPECT_THROW(sphere_family(4, g, spec), ConfigError);
  EXPECT_THROW(sphere_family(0, g, spec), ConfigError);
}
