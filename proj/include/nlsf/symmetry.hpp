#pragma once

#include <vector>

#include "nlsf/grid.hpp"
#include "nlsf/nonlinearity.hpp"

namespace nlsf {

/// (u - u o tau) / 2. Throws ConfigError on sectors without a (r1, r2) pair.
Field project_tau(const Field &u);

/// Odd C2 cutoff: sign(t) for |t| >= 1, (15t - 10t^3 + 3t^5)/8 inside.
double odd_cutoff(double t);

/// Plateau of height `amplitude` on [0, R], linear ramp to 0 on [R, R+1].
double plateau(double rho, double R, double amplitude);

/// u_rad(|x|) phi(r1 - r2) with u_rad a plateau at level xi0 of radius
/// R_bump; R_bump is doubled up to R_box/2 until int G > 0.
Field initializer(const GridPtr &grid, const NonlinearitySpec &spec,
                  double R_bump);

/// Seed for any sector: `initializer` on tau sectors, the bare plateau
/// u_rad(|x|) elsewhere (same doubling rule).
Field default_seed(const GridPtr &grid, const NonlinearitySpec &spec,
                   double R_bump);

struct SphereSample {
  std::vector<double> sigma;
  Field field;
  bool in_P;
};

/// Samples the odd map sigma -> sum_i (sigma_i / |sigma|_inf) b_i(|x|)
/// phi(r1 - r2) at the normalized nonzero points of {-1, 0, 1}^k, with b_i
/// disjoint plateau shells at level xi0. Samples come in antipodal pairs
/// (sigma, -sigma).
std::vector<SphereSample> sphere_family(int k, const GridPtr &grid,
                                        const NonlinearitySpec &spec);

} // namespace nlsf
