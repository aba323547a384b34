#include <cmath>

#include <gtest/gtest.h>

#include "nlsf/errors.hpp"
#include "nlsf/functionals.hpp"
#include "nlsf/solver.hpp"
#include "nlsf/symmetry.hpp"

using namespace nlsf;

namespace {

const SymmetrySector kRadial3{SectorKind::Radial, 3, 0, false};
const SymmetrySector kO2Tau4{SectorKind::TriradialO2, 4, 2, true};
// scipy shooting reference (see test_oracle).
constexpr double kJCubic3 = 18.89725130;
constexpr double kJQuad4 = 204.42844334;

NonlinearitySpec cubic3() {
  return truncate(NonlinearitySpec::power(1, 4, 2, 3));
}
NonlinearitySpec quad4() {
  return truncate(NonlinearitySpec::power(1, 3, 2, 4));
}

// One tau-sector ground state shared by several tests.
const SolveReport &tau_solution() {
  static const SolveReport rep = [] {
    const auto g = build_grid(kO2Tau4, 16, 64);
    return minimize(initializer(g, quad4(), 2.0), quad4(), SolveConfig{});
  }();
  return rep;
}

} // namespace

TEST(SolveConfig, Validation) {
  SolveConfig c;
  EXPECT_NO_THROW(c.validate());
  c.tol_grad = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SolveConfig{};
  c.armijo.backtrack = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SolveConfig{};
  c.max_iters = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SolveConfig{};
  c.reslice_ratio = 1;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Solver, RadialGroundStateMatchesReference) {
  const auto spec = cubic3();
  const auto g = build_grid(kRadial3, 20, 256);
  const auto rep = minimize(default_seed(g, spec, 1.0), spec, SolveConfig{});
  EXPECT_LT(rep.grad_norm, 1e-6);
  EXPECT_GT(rep.state.J, 0);
  EXPECT_NEAR(rep.state.J / kJCubic3, 1, 1e-2);
  EXPECT_LT(rep.pohozaev_residual, 1e-10);
  EXPECT_NEAR(rep.theta, 1, 1e-2);
  ASSERT_TRUE(rep.solution && rep.iterate);
  // J decreases along the run up to roundoff.
  for (std::size_t i = 1; i < rep.J_history.size(); ++i)
    EXPECT_LE(rep.J_history[i], rep.J_history[i - 1] * (1 + 1e-12));
  const auto again = summarize(*rep.iterate, spec);
  EXPECT_NEAR(again.state.J, rep.state.J, 1e-12 * rep.state.J);
  const auto led = verify_solution(rep, spec);
  EXPECT_EQ(led.checks.size(), 3u);
}

TEST(Solver, MaxItersThrows) {
  const auto spec = cubic3();
  const auto g = build_grid(kRadial3, 20, 128);
  SolveConfig c;
  c.max_iters = 2;
  EXPECT_THROW(minimize(default_seed(g, spec, 1.0), spec, c), MaxIters);
  const auto pen = minimize_penalized(default_seed(g, spec, 1.0), spec, c, {});
  EXPECT_EQ(pen.stop_reason, "max_iters");
}

TEST(Solver, SeedOutsideP) {
  const auto spec = cubic3();
  const auto g = build_grid(kRadial3, 20, 128);
  const Field small = sample_radial(g, [](double r) {
    return 0.1 * std::exp(-r * r);
  });
  EXPECT_THROW(minimize(small, spec, SolveConfig{}), NotInP);
}

TEST(Solver, TauGroundStateEnergyDoubling) {
  const auto &rep = tau_solution();
  EXPECT_LT(rep.grad_norm, 1e-6);
  EXPECT_GE(rep.state.J, 2 * kJQuad4);
  const auto led = verify_solution(rep, quad4());
  for (const auto &c : led.checks)
    if (c.name == "omega_split_energy" || c.name == "omega_split_pohozaev" ||
        c.name == "nonradiality" || c.name == "pohozaev_residual")
      EXPECT_TRUE(c.passed) << c.name << " = " << c.value;
  EXPECT_NEAR(led.J_omega1, led.J / 2, 1e-2 * led.J / 2);
}

TEST(Solver, DistanceModuloSign) {
  const auto &u = *tau_solution().iterate;
  EXPECT_EQ(distance_mod_sign(u, u), 0.0);
  EXPECT_EQ(distance_mod_sign(u, -1.0 * u), 0.0);
  EXPECT_GT(distance_mod_sign(u, 0.5 * u), 0.0);
}

TEST(Solver, NewtonPolishKeepsSolution) {
  const auto &rep = tau_solution();
  const auto pol = newton_polish(*rep.iterate, quad4(), SolveConfig{}, 5);
  EXPECT_LE(pol.grad_norm, 1e-6);
  EXPECT_NEAR(pol.state.J, rep.state.J, 1e-6 * rep.state.J);
}

TEST(Solver, NodalDescentNeedsSignChange) {
  const auto g = build_grid(kO2Tau4, 16, 48);
  const Field positive = initializer(g, quad4(), 2.0);
  EXPECT_FALSE(changes_sign_in_omega1(positive));
  EXPECT_THROW(nodal_descent(positive, quad4(), SolveConfig{}), ConfigError);
  const auto gr = build_grid(kRadial3, 16, 48);
  EXPECT_THROW(nodal_descent(Field(gr), cubic3(), SolveConfig{}),
               ConfigError);
}

TEST(Solver, NodalDescentFindsSignChangingSolution) {
  const auto spec = quad4();
  const auto g = build_grid(kO2Tau4, 18, 64);
  const auto fam = sphere_family(2, g, spec);
  // sigma = (1, -1)/sqrt2: inner ball positive, outer shell negative.
  const SphereSample *seed = nullptr;
  for (const auto &s : fam)
    if (s.sigma[0] > 0 && s.sigma[1] < 0)
      seed = &s;
  ASSERT_NE(seed, nullptr);
  ASSERT_TRUE(changes_sign_in_omega1(seed->field));
  const auto rep = nodal_descent(seed->field, spec, SolveConfig{});
  EXPECT_EQ(rep.stop_reason, "relative residual < tol");
  EXPECT_TRUE(changes_sign_in_omega1(*rep.iterate));
  EXPECT_NEAR(rep.theta, 1, 5e-2);
  // Residual is measured at m(u*); the discrete Pohozaev mismatch makes it
  // O(h^2), about 1.6e-2 on this coarse grid.
  EXPECT_LT(rep.residual_pde, 3e-2);
  EXPECT_GT(rep.state.J, tau_solution().state.J);
}

TEST(Solver, DeflationNeedsTauSector) {
  const auto g = build_grid(kRadial3, 16, 64);
  EXPECT_THROW(minimize_deflated(g, cubic3(), SolveConfig{}, 2), ConfigError);
}

TEST(Solver, RestrictOmega1) {
  const auto &u = *tau_solution().solution;
  const Field half = restrict_omega1(u);
  const Field other = u - half;
  // The two pieces are mirror images: equal L2 mass.
  EXPECT_NEAR(inner_products(half, half).l2, inner_products(other, other).l2,
              1e-10 * inner_products(u, u).l2);
  EXPECT_GT(nonradiality(u), 0.9);
}
