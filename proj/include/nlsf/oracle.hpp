#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nlsf/grid.hpp"
#include "nlsf/nonlinearity.hpp"

namespace nlsf {

/// Positive radial ground state of u'' + (N-1)/r u' + g(u) = 0.
struct RadialProfile {
  int dim_N = 3;
  double u0 = 0;
  std::vector<double> r;
  std::vector<double> u;
  /// Integrals over R^N.
  double psi = 0;
  double intG = 0;
  double int_gu = 0;
  double J = 0;
  double pohozaev_residual = 0; // |psi - 2* intG| / psi
  double theta = 0;             // int g(u) u / psi
  int bisections = 0;

  /// Monotone cubic interpolant of the samples, 0 beyond the last sample.
  double operator()(double radius) const;
};

struct ShootOptions {
  double r_max = 40;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double sample_dr = 1e-3;
};

/// Bisection on u(0). The bracket is found by geometric expansion from xi0
/// when absent; its low end must turn back up before reaching 0, its high
/// end must cross 0.
RadialProfile shoot(const NonlinearitySpec &spec, int dim_N,
                    std::optional<std::pair<double, double>> u0_bracket = {},
                    ShootOptions opts = {});

/// The profile sampled at |x| on a grid of the same dimension.
Field to_field(const RadialProfile &profile, const GridPtr &grid);

} // namespace nlsf
