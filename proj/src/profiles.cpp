#include "nlsf/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "nlsf/errors.hpp"

namespace nlsf {

namespace {

double sphere_area(int N) {
  return 2 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

double critical_exponent(int N) { return 2.0 * N / (N - 2); }

// Fraction of the sphere |x| = rho inside the ball B(y, r), |y| = d, in R^N.
double cap_fraction(double rho, double d, double r, int N) {
  if (d == 0 || rho == 0)
    return std::max(rho, d) < r ? 1.0 : 0.0;
  const double c = (rho * rho + d * d - r * r) / (2 * rho * d);
  if (c >= 1)
    return 0.0;
  if (c <= -1)
    return 1.0;
  const double half =
      0.5 * boost::math::ibeta(0.5 * (N - 1), 0.5, 1 - c * c);
  return c >= 0 ? half : 1 - half;
}

// v(x + offset h), zero outside the axis.
Eigen::VectorXd shift(const Eigen::VectorXd &v, long offset) {
  const long n = static_cast<long>(v.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (long i = 0; i < n; ++i) {
    const long j = i + offset;
    if (j >= 0 && j < n)
      out[i] = v[j];
  }
  return out;
}

long node_offset(const AxisLine &axis, double y) {
  return std::lround(y / axis.h);
}

void check_ladder(const std::vector<int> &ladder) {
  if (ladder.empty())
    throw ConfigError("empty n ladder");
  for (std::size_t k = 0; k < ladder.size(); ++k)
    if (ladder[k] < 1 || (k > 0 && ladder[k] <= ladder[k - 1]))
      throw ConfigError("n ladder must be positive and strictly increasing");
}

// Psi(s) / s^q at s = 2^{sign * k}, k = lo..hi.
std::vector<double> ratio_ladder(const ScalarMap &Psi, double q, int sign,
                                 int lo, int hi) {
  std::vector<double> out;
  for (int k = lo; k <= hi; ++k) {
    const double s = std::ldexp(1.0, sign * k);
    out.push_back(std::abs(Psi(s)) / std::pow(s, q));
  }
  return out;
}

bool tends_to_zero(const std::vector<double> &r) {
  if (!std::all_of(r.begin(), r.end(),
                   [](double v) { return std::isfinite(v); }))
    return false;
  if (r.back() <= 1e-3 * std::max(1.0, r.front()))
    return true;
  const std::size_t n = r.size();
  for (std::size_t k = n - 20; k + 1 < n; ++k)
    if (!(r[k + 1] < r[k]))
      return false;
  return r.back() <= 0.5 * r[n - 21];
}

bool stays_bounded(const std::vector<double> &r) {
  if (!std::all_of(r.begin(), r.end(),
                   [](double v) { return std::isfinite(v); }))
    return false;
  const double early = *std::max_element(r.begin(), r.begin() + 10);
  const double late = *std::max_element(r.end() - 10, r.end());
  return late <= 1.01 * early + std::numeric_limits<double>::min();
}

// v_n^i at ladder position k: u_n minus the first i+1 translated profiles.
Eigen::VectorXd remainder_after(const ProfileSet &ps, const Eigen::VectorXd &u,
                                std::size_t k, std::size_t i) {
  Eigen::VectorXd v = u;
  for (std::size_t j = 0; j <= i; ++j)
    v -= shift(ps.profiles[j], -node_offset(ps.axis, ps.centers[j][k]));
  return v;
}

double peak_in_window(const AxisLine &axis, const Eigen::VectorXd &v,
                      double center, double r) {
  const long c = static_cast<long>(axis.index_of(center));
  const long m = static_cast<long>(std::floor(r / axis.h + 1e-9));
  const long n = static_cast<long>(v.size());
  long best = std::max(0L, c - m);
  for (long i = best; i <= std::min(n - 1, c + m); ++i)
    if (std::abs(v[i]) > std::abs(v[best]))
      best = i;
  return axis.x(static_cast<std::size_t>(best));
}

double relative(double defect, double lhs) {
  return std::abs(defect) / (lhs != 0 ? std::abs(lhs) : 1.0);
}

} // namespace

AxisLine AxisLine::line(double L, double h) {
  if (!(L > 0) || !(h > 0) || h > L)
    throw ConfigError("axis needs 0 < h <= L");
  return AxisLine{Kind::Line, L, h, 1};
}

AxisLine AxisLine::radial(int N, double L, double h) {
  if (N < 2)
    throw ConfigError("radial axis needs N >= 2");
  if (!(L > 0) || !(h > 0) || h > L)
    throw ConfigError("axis needs 0 < h <= L");
  return AxisLine{Kind::Radial, L, h, N};
}

std::size_t AxisLine::size() const {
  const double span = kind == Kind::Line ? 2 * L : L;
  return static_cast<std::size_t>(std::lround(span / h)) + 1;
}

double AxisLine::x(std::size_t i) const {
  const double x0 = kind == Kind::Line ? -L : 0.0;
  return x0 + static_cast<double>(i) * h;
}

Eigen::VectorXd AxisLine::weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(
      static_cast<Eigen::Index>(size()), h);
  if (kind == Kind::Radial) {
    const double S = sphere_area(dim_N);
    for (std::size_t i = 0; i < size(); ++i)
      w[static_cast<Eigen::Index>(i)] *= S * std::pow(x(i), dim_N - 1);
  }
  return w;
}

std::size_t AxisLine::index_of(double xv) const {
  const double x0 = kind == Kind::Line ? -L : 0.0;
  const double t = (xv - x0) / h;
  const long i = std::lround(t);
  if (std::abs(t - static_cast<double>(i)) > 1e-9 || i < 0 ||
      static_cast<std::size_t>(i) >= size())
    throw ConfigError("coordinate is not a node of the axis");
  return static_cast<std::size_t>(i);
}

double AxisLine::mass(const Eigen::VectorXd &u) const {
  return weights().dot(u.cwiseAbs2());
}

double AxisLine::dirichlet(const Eigen::VectorXd &u) const {
  const double S = kind == Kind::Radial ? sphere_area(dim_N) : 1.0;
  double acc = 0;
  for (Eigen::Index i = 0; i + 1 < u.size(); ++i) {
    const double du = u[i + 1] - u[i];
    double c = 1.0 / h;
    if (kind == Kind::Radial)
      c *= S * std::pow(x(static_cast<std::size_t>(i)) + 0.5 * h, dim_N - 1);
    acc += c * du * du;
  }
  return acc;
}

double AxisLine::integral(const Eigen::VectorXd &u,
                          const std::function<double(double)> &Psi) const {
  const Eigen::VectorXd w = weights();
  double acc = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    acc += w[i] * Psi(u[i]);
  return acc;
}

Eigen::VectorXd SyntheticSequence::sample(int n) const {
  if (profiles.size() != centers.size())
    throw ConfigError("each profile needs a center rule");
  const std::size_t sz = axis.size();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sz));
  const int N_tail = axis.kind == AxisLine::Kind::Line ? 1 : axis.dim_N;
  const double tail_scale =
      tail_amplitude * std::pow(static_cast<double>(n), -0.5 * N_tail);
  std::vector<double> y(centers.size());
  for (std::size_t j = 0; j < centers.size(); ++j)
    y[j] = centers[j](n);
  for (std::size_t i = 0; i < sz; ++i) {
    const double x = axis.x(i);
    double v = 0;
    for (std::size_t j = 0; j < profiles.size(); ++j)
      v += profiles[j](x - y[j]);
    if (tail && tail_amplitude != 0)
      v += tail_scale * tail(x / n);
    u[static_cast<Eigen::Index>(i)] = v;
  }
  return u;
}

Eigen::VectorXd SyntheticSequence::truth(std::size_t j) const {
  Eigen::VectorXd u(static_cast<Eigen::Index>(axis.size()));
  for (std::size_t i = 0; i < axis.size(); ++i)
    u[static_cast<Eigen::Index>(i)] = profiles.at(j)(axis.x(i));
  return u;
}

std::size_t ProfileSet::recovered() const {
  return static_cast<std::size_t>(
      std::count_if(profiles.begin(), profiles.end(),
                    [&](const Eigen::VectorXd &p) {
                      return axis.mass(p) > mass_floor;
                    }));
}

WindowMax window_sup_mass(const AxisLine &axis, const Eigen::VectorXd &u,
                          double r) {
  if (!(r > 0))
    throw ConfigError("window radius must be positive");
  const Eigen::VectorXd w = axis.weights();
  const long n = static_cast<long>(u.size());
  const long m = static_cast<long>(std::floor(r / axis.h + 1e-9));
  WindowMax best{-1.0, 0.0};
  if (axis.kind == AxisLine::Kind::Line) {
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (long i = 0; i < n; ++i)
      prefix[static_cast<std::size_t>(i) + 1] =
          prefix[static_cast<std::size_t>(i)] + w[i] * u[i] * u[i];
    for (long c = 0; c < n; ++c) {
      const long lo = std::max(0L, c - m);
      const long hi = std::min(n - 1, c + m);
      const double mass = prefix[static_cast<std::size_t>(hi) + 1] -
                          prefix[static_cast<std::size_t>(lo)];
      if (mass > best.mass)
        best = {mass, axis.x(static_cast<std::size_t>(c))};
    }
    return best;
  }
  for (long c = 0; c < n; ++c) {
    const double d = axis.x(static_cast<std::size_t>(c));
    double mass = 0;
    for (long i = std::max(0L, c - m - 1); i <= std::min(n - 1, c + m + 1);
         ++i)
      mass += w[i] * u[i] * u[i] *
              cap_fraction(axis.x(static_cast<std::size_t>(i)), d, r,
                           axis.dim_N);
    if (mass > best.mass)
      best = {mass, d};
  }
  return best;
}

ProfileSet extract(const SyntheticSequence &seq, const std::vector<int> &ladder,
                   double r_window, std::optional<double> mass_floor) {
  if (seq.axis.kind != AxisLine::Kind::Line)
    throw ConfigError("profile extraction needs a Line axis");
  check_ladder(ladder);
  if (!(r_window >= seq.axis.h))
    throw ConfigError("r_window must be positive and at least one node");

  ProfileSet ps;
  ps.axis = seq.axis;
  ps.ladder = ladder;
  ps.r_window = r_window;
  const std::size_t K = ladder.size();
  std::vector<Eigen::VectorXd> V;
  double sup_norm2 = 0;
  for (int n : ladder) {
    V.push_back(seq.sample(n));
    sup_norm2 = std::max(sup_norm2, seq.axis.mass(V.back()));
  }
  ps.mass_floor = mass_floor.value_or(1e-4 * sup_norm2);
  if (!(ps.mass_floor > 0))
    throw ConfigError("mass_floor must be positive");

  // Localized average over the top half of the ladder.
  const std::size_t top0 = K / 2;
  Eigen::VectorXd ball(static_cast<Eigen::Index>(seq.axis.size()));
  for (std::size_t i = 0; i < seq.axis.size(); ++i)
    ball[static_cast<Eigen::Index>(i)] =
        std::abs(seq.axis.x(i)) <= r_window + 1e-9 * seq.axis.h ? 1.0 : 0.0;
  auto local_limit = [&](const std::vector<double> &y) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(ball.size());
    for (std::size_t k = top0; k < K; ++k)
      acc += shift(V[k], node_offset(seq.axis, y[k]));
    acc /= static_cast<double>(K - top0);
    return Eigen::VectorXd(acc.cwiseProduct(ball));
  };
  auto record_sup = [&] {
    std::vector<double> s;
    for (const auto &v : V)
      s.push_back(window_sup_mass(seq.axis, v, r_window).mass);
    ps.sup_mass.push_back(std::move(s));
  };

  const std::vector<double> zero(K, 0.0);
  ps.profiles.push_back(local_limit(zero));
  ps.centers.push_back(zero);
  for (auto &v : V)
    v -= ps.profiles[0];
  record_sup();
  std::vector<double> taken; // top-of-ladder centers of nontrivial profiles
  if (seq.axis.mass(ps.profiles[0]) > ps.mass_floor)
    taken.push_back(0.0);

  constexpr int kMaxProfiles = 64;
  for (int i = 1;; ++i) {
    std::vector<WindowMax> wm;
    for (const auto &v : V)
      wm.push_back(window_sup_mass(seq.axis, v, r_window));
    if (wm.back().mass < ps.mass_floor)
      break;
    if (i > kMaxProfiles)
      throw WindowTooSmall("windowed mass does not vanish after 64 profiles");
    for (double y : taken)
      if (std::abs(wm.back().center - y) < 2 * r_window) {
        std::ostringstream msg;
        msg << "mass " << wm.back().mass << " remains at " << wm.back().center
            << ", beside the profile at " << y << "; r_window = " << r_window
            << " does not hold the profile";
        throw WindowTooSmall(msg.str());
      }
    // A window wider than the bump gives a plateau of near-equal masses;
    // recenter on the peak of |v| inside the chosen window.
    std::vector<double> y;
    for (std::size_t k = 0; k < K; ++k)
      y.push_back(peak_in_window(seq.axis, V[k], wm[k].center, r_window));
    ps.profiles.push_back(local_limit(y));
    for (std::size_t k = 0; k < K; ++k)
      V[k] -= shift(ps.profiles.back(), -node_offset(seq.axis, y[k]));
    ps.centers.push_back(y);
    taken.push_back(y.back());
    record_sup();
  }
  ps.remainder = std::move(V);
  return ps;
}

std::vector<double> recovery_errors(const ProfileSet &ps,
                                    const SyntheticSequence &seq) {
  const int n = ps.ladder.back();
  const std::size_t k = ps.ladder.size() - 1;
  std::vector<double> out;
  for (std::size_t j = 0; j < seq.profiles.size(); ++j) {
    const double y = seq.centers[j](n);
    std::size_t best = 0;
    for (std::size_t i = 1; i < ps.profiles.size(); ++i)
      if (std::abs(ps.centers[i][k] - y) < std::abs(ps.centers[best][k] - y))
        best = i;
    const Eigen::VectorXd t = seq.truth(j);
    const Eigen::VectorXd d = ps.profiles[best] - t;
    out.push_back(std::sqrt(ps.axis.mass(d) / ps.axis.mass(t)));
  }
  return out;
}

double lions_exponent(int N) {
  if (N < 3)
    throw ConfigError("the Lions exponent needs N >= 3");
  return 0.5 * (2 + critical_exponent(N));
}

std::vector<LedgerRow> splitting_ledger(const ProfileSet &ps,
                                        const ScalarMap &Psi,
                                        const SyntheticSequence &seq) {
  if (!stays_bounded(ratio_ladder(Psi, 2.0, -1, 1, 40)))
    throw ConfigError("Psi(s) / s^2 is unbounded as s -> 0");
  if (ps.axis.dim_N >= 3 &&
      !stays_bounded(
          ratio_ladder(Psi, critical_exponent(ps.axis.dim_N), 1, 1, 40)))
    throw ConfigError("Psi(s) / |s|^{2*} is unbounded as s -> infinity");

  const std::size_t k = ps.ladder.size() - 1;
  const int n = ps.ladder[k];
  const Eigen::VectorXd u = seq.sample(n);
  const double D_lhs = ps.axis.dirichlet(u);
  const double P_lhs = ps.axis.integral(u, Psi);
  std::vector<LedgerRow> rows;
  double D_sum = 0, P_sum = 0;
  for (std::size_t i = 0; i < ps.profiles.size(); ++i) {
    D_sum += ps.axis.dirichlet(ps.profiles[i]);
    P_sum += ps.axis.integral(ps.profiles[i], Psi);
    const Eigen::VectorXd v = remainder_after(ps, u, k, i);
    const double D_rem = ps.axis.dirichlet(v);
    const double P_rem = ps.axis.integral(v, Psi);
    const int ii = static_cast<int>(i);
    rows.push_back({"dirichlet", ii, n, D_lhs, D_sum, D_rem,
                    relative(D_lhs - D_sum - D_rem, D_lhs)});
    rows.push_back({"Psi", ii, n, P_lhs, P_sum, P_rem,
                    relative(P_lhs - P_sum - P_rem, P_lhs)});
  }
  return rows;
}

VanishingTrace vanishing_test(const SyntheticSequence &seq,
                              const std::vector<int> &ladder,
                              const ScalarMap &Psi, double r) {
  check_ladder(ladder);
  if (!tends_to_zero(ratio_ladder(Psi, 2.0, -1, 1, 40)))
    throw ConfigError("Psi(s) / s^2 does not tend to 0 as s -> 0");
  if (seq.axis.dim_N >= 3 &&
      !tends_to_zero(
          ratio_ladder(Psi, critical_exponent(seq.axis.dim_N), 1, 1, 40)))
    throw ConfigError("Psi(s) / |s|^{2*} does not tend to 0 as s -> infinity");

  VanishingTrace tr;
  tr.ladder = ladder;
  for (int n : ladder) {
    const Eigen::VectorXd u = seq.sample(n);
    tr.sup_mass.push_back(window_sup_mass(seq.axis, u, r).mass);
    tr.psi_integral.push_back(seq.axis.integral(u, Psi));
  }
  tr.vanishing = true;
  for (std::size_t k = ladder.size() / 2; k + 1 < ladder.size(); ++k)
    tr.vanishing = tr.vanishing && tr.sup_mass[k + 1] < tr.sup_mass[k] &&
                   tr.psi_integral[k + 1] < tr.psi_integral[k];
  return tr;
}

ThetaLedger theta_ledger(const ProfileSet &ps, const SyntheticSequence &seq,
                         const NonlinearitySpec &spec) {
  ThetaLedger led;
  if (ps.profiles.empty())
    return led;
  const std::size_t k = ps.ladder.size() - 1;
  const Eigen::VectorXd u = seq.sample(ps.ladder[k]);
  const Eigen::VectorXd v = ps.remainder[k];
  auto G1 = [&](double s) { return spec.G1(s); };
  auto G2 = [&](double s) { return spec.G2(s); };

  double G1_sum = 0, G2_sum = 0, D_sum = 0;
  led.max_theta = -std::numeric_limits<double>::infinity();
  for (const auto &p : ps.profiles) {
    G1_sum += ps.axis.integral(p, G1);
    G2_sum += ps.axis.integral(p, G2);
    const double D = ps.axis.dirichlet(p);
    D_sum += D;
    if (!(ps.axis.mass(p) > ps.mass_floor)) {
      led.theta.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double gu =
        ps.axis.integral(p, [&](double s) { return spec.g(s) * s; });
    led.theta.push_back(gu / D);
    led.max_theta = std::max(led.max_theta, gu / D);
  }
  const double G1_lhs = ps.axis.integral(u, G1);
  led.G1_defect =
      relative(G1_lhs - G1_sum - ps.axis.integral(v, G1), G1_lhs);
  const double G2_lhs = ps.axis.integral(u, G2);
  led.G2_excess = relative(std::max(0.0, G2_sum - G2_lhs), G2_lhs);
  const double D_lhs = ps.axis.dirichlet(u);
  led.psi_excess = relative(std::max(0.0, D_sum - D_lhs), D_lhs);
  led.some_theta_ge_one = led.max_theta >= 1;
  return led;
}

} // namespace nlsf
