#include "nlsf/oracle.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "nlsf/errors.hpp"
#include "nlsf/interp.hpp"

namespace nlsf {

namespace {

namespace odeint = boost::numeric::odeint;

// u, u', int u'^2 r^{N-1}, int G(u) r^{N-1}, int g(u) u r^{N-1}
using State = std::array<double, 5>;

enum class Outcome { TooLow, TooHigh, Undecided };

struct Trajectory {
  Outcome outcome = Outcome::Undecided;
  std::vector<double> r;
  std::vector<State> x;
};

Trajectory integrate(const NonlinearitySpec &spec, int N, double u0,
                     const ShootOptions &opts, bool record) {
  const auto rhs = [&](const State &x, State &dx, double r) {
    const double u = x[0], up = x[1];
    const double w = std::pow(r, N - 1);
    const double gu = spec.g(u);
    dx[0] = up;
    dx[1] = -gu - (N - 1) / r * up;
    dx[2] = up * up * w;
    dx[3] = spec.G(u) * w;
    dx[4] = gu * u * w;
  };

  // Series start: u = u0 - g(u0) r^2 / (2N), u' = -g(u0) r / N.
  const double g0 = spec.g(u0);
  const double r0 = 1e-6;
  State x{u0 - g0 * r0 * r0 / (2 * N), -g0 * r0 / N, 0, 0, 0};

  auto stepper = odeint::make_dense_output(
      opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(x, r0, 1e-4);

  Trajectory t;
  const double limit = std::isfinite(spec.xi1()) ? 2 * spec.xi1() : 10 * u0;
  double next = 0;
  if (record) {
    t.r.push_back(0.0);
    t.x.push_back({u0, 0, 0, 0, 0});
    next = opts.sample_dr;
  }
  while (stepper.current_time() < opts.r_max) {
    stepper.do_step(rhs);
    if (stepper.current_time_step() < 1e-13)
      throw Stiff("shooting step size underflow");
    if (record) {
      while (next <= stepper.current_time() && next <= opts.r_max) {
        State y;
        stepper.calc_state(next, y);
        t.r.push_back(next);
        t.x.push_back(y);
        next += opts.sample_dr;
      }
    }
    const State &s = stepper.current_state();
    if (s[0] <= 0) {
      t.outcome = Outcome::TooHigh;
      return t;
    }
    if (s[1] > 0 || std::abs(s[0]) > limit) {
      t.outcome = Outcome::TooLow;
      return t;
    }
  }
  return t;
}

Outcome classify(const NonlinearitySpec &spec, int N, double u0,
                 const ShootOptions &opts) {
  return integrate(spec, N, u0, opts, false).outcome;
}

} // namespace

double RadialProfile::operator()(double radius) const {
  if (r.empty() || radius > r.back())
    return 0.0;
  // Locate and interpolate on a local window to avoid building the full
  // interpolant per call.
  const double dr = r[1] - r[0];
  const auto i = static_cast<std::size_t>(radius / dr);
  const std::size_t lo = i >= 2 ? i - 2 : 0;
  const std::size_t hi = std::min(r.size(), lo + 6);
  MonotoneCubic local(std::vector<double>(r.begin() + static_cast<long>(lo),
                                          r.begin() + static_cast<long>(hi)),
                      std::vector<double>(u.begin() + static_cast<long>(lo),
                                          u.begin() + static_cast<long>(hi)),
                      lo == 0 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
  return local(radius);
}

RadialProfile shoot(const NonlinearitySpec &spec, int dim_N,
                    std::optional<std::pair<double, double>> u0_bracket,
                    ShootOptions opts) {
  if (spec.dim_N() != dim_N)
    throw ConfigError("shoot: nonlinearity dimension differs from N");
  double lo, hi;
  if (u0_bracket) {
    std::tie(lo, hi) = *u0_bracket;
    const auto a = classify(spec, dim_N, lo, opts);
    const auto b = classify(spec, dim_N, hi, opts);
    if (a == b) {
      std::ostringstream msg;
      msg << "both bracket ends [" << lo << ", " << hi
          << "] classify the same way";
      throw BracketInvalid(msg.str());
    }
    if (a == Outcome::TooHigh)
      std::swap(lo, hi);
  } else {
    const double top =
        std::isfinite(spec.xi1()) ? spec.xi1() : spec.xi0() * std::ldexp(1, 40);
    hi = spec.xi0();
    while (classify(spec, dim_N, hi, opts) != Outcome::TooHigh) {
      hi *= 2;
      if (hi > top) {
        if (std::isfinite(spec.xi1()) && hi / 2 < spec.xi1()) {
          hi = spec.xi1() * (1 - 1e-12);
          if (classify(spec, dim_N, hi, opts) == Outcome::TooHigh)
            break;
        }
        throw BracketInvalid("no overshooting u(0) found above xi0");
      }
    }
    lo = hi / 2;
    int tries = 0;
    while (classify(spec, dim_N, lo, opts) != Outcome::TooLow) {
      lo /= 2;
      if (++tries > 60)
        throw BracketInvalid("no undershooting u(0) found below xi0");
    }
  }

  RadialProfile p;
  p.dim_N = dim_N;
  while (hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    const auto c = classify(spec, dim_N, mid, opts);
    (c == Outcome::TooHigh ? hi : lo) = mid;
    ++p.bisections;
  }

  // The two ends agree until their exponentially growing separation shows;
  // keep the average up to there and continue with the linearized decay.
  const auto a = integrate(spec, dim_N, lo, opts, true);
  const auto b = integrate(spec, dim_N, hi, opts, true);
  const std::size_t n = std::min(a.r.size(), b.r.size());
  std::size_t cut = 1;
  for (; cut < n; ++cut) {
    const double ua = a.x[cut][0], ub = b.x[cut][0];
    if (std::abs(ua - ub) > 1e-3 * std::abs(ua) || ua <= 0 || ub <= 0 ||
        a.x[cut][1] >= 0)
      break;
  }
  cut -= 1;
  p.u0 = 0.5 * (lo + hi);
  for (std::size_t i = 0; i <= cut; ++i) {
    p.r.push_back(a.r[i]);
    p.u.push_back(0.5 * (a.x[i][0] + b.x[i][0]));
  }
  const double rc = p.r.back(), uc = p.u.back();
  const double k = std::sqrt(spec.m());
  for (double r = rc + opts.sample_dr; r <= opts.r_max; r += opts.sample_dr) {
    p.r.push_back(r);
    p.u.push_back(uc * std::pow(rc / r, 0.5 * (dim_N - 1)) *
                  std::exp(-k * (r - rc)));
  }

  const double area = 2 * std::pow(std::numbers::pi, 0.5 * dim_N) /
                      std::tgamma(0.5 * dim_N);
  const State &s = a.x[cut];
  p.psi = area * s[2];
  p.intG = area * s[3];
  p.int_gu = area * s[4];
  p.J = 0.5 * p.psi - p.intG;
  p.pohozaev_residual =
      std::abs(p.psi - spec.critical_exponent() * p.intG) / p.psi;
  p.theta = p.int_gu / p.psi;
  return p;
}

Field to_field(const RadialProfile &profile, const GridPtr &grid) {
  if (grid->sector().dim_N != profile.dim_N)
    throw ConfigError("profile dimension differs from the grid sector");
  return sample_radial(grid, [&](double r) { return profile(r); });
}

} // namespace nlsf
