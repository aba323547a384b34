#include "nlsf/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlsf/errors.hpp"
#include "nlsf/functionals.hpp"

namespace nlsf {

namespace {

void require_tau_sector(const ReducedGrid &g, const char *what) {
  if (!g.sector().tau_antisym || !g.has_tau())
    throw ConfigError(std::string(what) +
                      " needs a tau-antisymmetric BiradialO1/TriradialO2 "
                      "sector");
}

// Shell of width `width` starting at `inner`, unit ramps on both sides (the
// innermost shell is a ball).
double shell(double rho, double inner, double width, double amplitude) {
  const double outer = inner + width;
  if (rho >= outer || (inner > 0 && rho <= inner))
    return 0.0;
  double v = amplitude;
  if (rho > outer - 1)
    v *= outer - rho;
  if (inner > 0 && rho < inner + 1)
    v *= rho - inner;
  return v;
}

} // namespace

Field project_tau(const Field &u) {
  const auto &g = u.grid();
  if (g.sector().kind == SectorKind::Radial || !g.has_tau())
    throw ConfigError("tau projection is undefined on the Radial sector: "
                      "X_tau contains no nontrivial radial functions");
  const auto &perm = g.tau_permutation();
  const auto &v = u.values();
  Eigen::VectorXd out(v.size());
  for (Eigen::Index p = 0; p < v.size(); ++p)
    out[p] = 0.5 * (v[p] - v[static_cast<Eigen::Index>(perm[p])]);
  return Field(u.grid_ptr(), std::move(out));
}

double odd_cutoff(double t) {
  if (t >= 1)
    return 1.0;
  if (t <= -1)
    return -1.0;
  const double t2 = t * t;
  return t * (15 - t2 * (10 - 3 * t2)) / 8;
}

double plateau(double rho, double R, double amplitude) {
  if (rho <= R)
    return amplitude;
  if (rho >= R + 1)
    return 0.0;
  return amplitude * (R + 1 - rho);
}

namespace {

Field plateau_seed(const GridPtr &grid, const NonlinearitySpec &spec,
                   double R_bump, bool odd) {
  if (!(R_bump > 0))
    throw ConfigError("R_bump must be positive");
  const double xi0 = spec.xi0();
  const double limit = grid->box_radius() / 2;
  double last_intG = 0;
  for (double R = R_bump;; R *= 2) {
    Field u = sample(grid, [&](std::span<const double> x) {
      double rho2 = 0;
      for (double c : x)
        rho2 += c * c;
      const double v = plateau(std::sqrt(rho2), R, xi0);
      return odd ? v * odd_cutoff(x[0] - x[1]) : v;
    });
    last_intG = integral_G(u, spec);
    if (last_intG > 0)
      return u;
    if (2 * R > limit)
      break;
  }
  std::ostringstream msg;
  msg << "int G stays <= 0 (" << last_intG << ") up to R_bump = R_box/2 = "
      << limit << "; enlarge the box";
  throw PositivityUnreachable(msg.str());
}

} // namespace

Field initializer(const GridPtr &grid, const NonlinearitySpec &spec,
                  double R_bump) {
  require_tau_sector(*grid, "initializer");
  return plateau_seed(grid, spec, R_bump, true);
}

Field default_seed(const GridPtr &grid, const NonlinearitySpec &spec,
                   double R_bump) {
  if (grid->sector().tau_antisym)
    return initializer(grid, spec, R_bump);
  return plateau_seed(grid, spec, R_bump, false);
}

std::vector<SphereSample> sphere_family(int k, const GridPtr &grid,
                                        const NonlinearitySpec &spec) {
  require_tau_sector(*grid, "sphere_family");
  if (grid->sector().kind != SectorKind::TriradialO2)
    throw ConfigError("sphere_family needs the TriradialO2 sector");
  if (k < 1)
    throw ConfigError("sphere_family needs k >= 1");
  // Shells share the inner half of the box; each needs two unit ramps and a
  // plateau at least as wide.
  const double width = grid->box_radius() / 2 / k;
  if (width < 3 || k > 8) {
    std::ostringstream msg;
    msg << "box of radius " << grid->box_radius() << " supports at most "
        << std::min(8, static_cast<int>(grid->box_radius() / 6))
        << " disjoint shells, requested " << k;
    throw ConfigError(msg.str());
  }

  const double xi0 = spec.xi0();
  std::vector<Field> basis;
  for (int i = 0; i < k; ++i)
    basis.push_back(sample(grid, [&](std::span<const double> x) {
      double rho2 = 0;
      for (double c : x)
        rho2 += c * c;
      return shell(std::sqrt(rho2), i * width, width, xi0) *
             odd_cutoff(x[0] - x[1]);
    }));

  // Half of {-1,0,1}^k \ {0}: first nonzero entry positive; each is followed
  // by its antipode.
  std::vector<SphereSample> out;
  std::vector<int> digits(static_cast<std::size_t>(k), -1);
  const long total = std::lround(std::pow(3.0, k));
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (int i = 0; i < k; ++i) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(c % 3) - 1;
      c /= 3;
    }
    const auto nz = std::find_if(digits.begin(), digits.end(),
                                 [](int d) { return d != 0; });
    if (nz == digits.end() || *nz < 0)
      continue;
    double norm = 0;
    for (int d : digits)
      norm += d * d;
    norm = std::sqrt(norm);
    // sigma lives on the unit sphere; the field uses sigma / |sigma|_inf so
    // every active shell sits at level +-xi0.
    std::vector<double> sigma(digits.size());
    Field f(grid);
    for (std::size_t i = 0; i < digits.size(); ++i) {
      sigma[i] = digits[i] / norm;
      if (digits[i] != 0)
        f += static_cast<double>(digits[i]) * basis[i];
    }
    std::vector<double> minus(sigma.size());
    std::transform(sigma.begin(), sigma.end(), minus.begin(),
                   [](double s) { return -s; });
    Field g = -1.0 * f;
    const bool pos = integral_G(f, spec) > 0;
    const bool neg = integral_G(g, spec) > 0;
    out.push_back({std::move(sigma), std::move(f), pos});
    out.push_back({std::move(minus), std::move(g), neg});
  }
  return out;
}

} // namespace nlsf
