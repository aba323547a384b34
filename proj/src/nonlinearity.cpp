#include "nlsf/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlsf/errors.hpp"

namespace nlsf {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

double odd(double s, double value_at_abs) {
  return s < 0 ? -value_at_abs : value_at_abs;
}

double integrate(const ScalarMap &f, double a, double b) {
  if (b <= a)
    return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 20, 1e-13);
}

std::string fmt_assumption(const std::string &tag, const std::string &msg) {
  return "nonlinearity violates " + tag + ": " + msg;
}

} // namespace

NonlinearitySpec NonlinearitySpec::power(double m, double p, double xi0,
                                         int dim_N) {
  NonlinearitySpec spec(PowerFamily{p}, m, xi0, dim_N);
  if (!(p > 2))
    throw ConfigError(fmt_assumption("(g1)", "power family needs p > 2"));
  spec.validate();
  return spec;
}

NonlinearitySpec NonlinearitySpec::cubic_quintic(double m, double a, double b,
                                                 double xi0, int dim_N) {
  NonlinearitySpec spec(CubicQuinticFamily{a, b}, m, xi0, dim_N);
  spec.validate();
  return spec;
}

NonlinearitySpec NonlinearitySpec::tabulated(std::vector<double> s,
                                             std::vector<double> g, double m,
                                             double xi0, int dim_N) {
  if (s.size() != g.size() || s.empty())
    throw ConfigError("tabulated nonlinearity: mismatched or empty samples");
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](auto i, auto j) { return s[i] < s[j]; });

  std::vector<double> xs, ys, neg_s, neg_g;
  for (auto i : order) {
    if (s[i] < 0) {
      neg_s.push_back(s[i]);
      neg_g.push_back(g[i]);
    } else {
      if (!xs.empty() && s[i] == xs.back())
        throw ConfigError("tabulated nonlinearity: duplicate sample points");
      xs.push_back(s[i]);
      ys.push_back(g[i]);
    }
  }
  if (xs.empty() || xs.front() != 0.0) {
    xs.insert(xs.begin(), 0.0);
    ys.insert(ys.begin(), 0.0);
  }
  if (ys.front() != 0.0)
    throw ConfigError(fmt_assumption("(g0)", "odd g requires g(0) = 0"));
  if (xs.size() < 4)
    throw ConfigError("tabulated nonlinearity: need at least 4 samples");

  auto table = std::make_shared<const MonotoneCubic>(xs, ys);
  for (std::size_t k = 0; k < neg_s.size(); ++k) {
    const double t = -neg_s[k];
    if (t > table->back())
      continue;
    const double expect = -(*table)(t);
    if (std::abs(neg_g[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw ConfigError(fmt_assumption(
          "(g0)", "samples at negative s are not the odd reflection"));
  }

  NonlinearitySpec spec(TabulatedFamily{table}, m, xi0, dim_N);

  // Cumulative G1 at knots; g1 has kinks where g + m s changes sign, so
  // integrate each interval adaptively.
  auto knots = std::make_shared<std::vector<double>>(xs.size(), 0.0);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    (*knots)[i] = (*knots)[i - 1] +
                  integrate([&](double t) {
                    return std::max(spec.raw_g(t) + m * t, 0.0);
                  },
                            xs[i - 1], xs[i]);
  }
  spec.g1_knots_ = std::move(knots);
  spec.validate();
  return spec;
}

NonlinearitySpec NonlinearitySpec::from_csv(const std::filesystem::path &path,
                                            double m, double xi0, int dim_N) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open nonlinearity table " + path.string());
  std::vector<double> s, g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (!(row >> a >> b)) {
      if (s.empty())
        continue; // header row
      throw ConfigError("malformed row in " + path.string() + ": " + line);
    }
    s.push_back(a);
    g.push_back(b);
  }
  return tabulated(std::move(s), std::move(g), m, xi0, dim_N);
}

double NonlinearitySpec::raw_g(double s) const {
  return std::visit(
      overloaded{
          [&](const PowerFamily &f) {
            return -m_ * s + std::pow(s, f.p - 1);
          },
          [&](const CubicQuinticFamily &f) {
            const double s2 = s * s;
            return s * (-m_ + s2 * (f.a - f.b * s2));
          },
          [&](const TabulatedFamily &f) {
            return s >= f.table->back() ? f.table->values().back()
                                        : (*f.table)(s);
          }},
      family_);
}

double NonlinearitySpec::raw_G(double s) const {
  return std::visit(
      overloaded{
          [&](const PowerFamily &f) {
            return -m_ * s * s / 2 + std::pow(s, f.p) / f.p;
          },
          [&](const CubicQuinticFamily &f) {
            const double s2 = s * s;
            return s2 * (-m_ / 2 + s2 * (f.a / 4 - f.b * s2 / 6));
          },
          [&](const TabulatedFamily &f) {
            const double top = f.table->back();
            if (s <= top)
              return f.table->integral(s);
            return f.table->integral(top) +
                   f.table->values().back() * (s - top);
          }},
      family_);
}

double NonlinearitySpec::raw_G1(double s) const {
  return std::visit(
      overloaded{
          [&](const PowerFamily &f) { return std::pow(s, f.p) / f.p; },
          [&](const CubicQuinticFamily &f) {
            // g + m s = s^3 (a - b s^2); integrate its positive part.
            auto P = [&](double t) {
              const double t2 = t * t;
              return t2 * t2 * (f.a / 4 - f.b * t2 / 6);
            };
            auto positive_at = [&](double t) {
              return f.a - f.b * t * t > 0;
            };
            std::vector<double> cuts{0.0};
            if (f.b != 0 && f.a / f.b > 0 && std::sqrt(f.a / f.b) < s)
              cuts.push_back(std::sqrt(f.a / f.b));
            cuts.push_back(s);
            double total = 0;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
              if (positive_at(0.5 * (cuts[i] + cuts[i + 1])))
                total += P(cuts[i + 1]) - P(cuts[i]);
            return total;
          },
          [&](const TabulatedFamily &f) {
            const auto x = f.table->knots();
            auto pos = [&](double t) {
              return std::max(raw_g(t) + m_ * t, 0.0);
            };
            if (s >= x.back())
              return g1_knots_->back() + integrate(pos, x.back(), s);
            const std::size_t i = static_cast<std::size_t>(
                std::upper_bound(x.begin(), x.end(), s) - x.begin() - 1);
            return (*g1_knots_)[i] + integrate(pos, x[i], s);
          }},
      family_);
}

double NonlinearitySpec::g(double s) const {
  const double a = std::abs(s);
  if (a > xi1_)
    return 0.0;
  return odd(s, raw_g(a));
}

double NonlinearitySpec::G(double s) const {
  return raw_G(std::min(std::abs(s), xi1_));
}

double NonlinearitySpec::g1(double s) const {
  const double a = std::abs(s);
  return odd(s, std::max(g(a) + m_ * a, 0.0));
}

double NonlinearitySpec::G1(double s) const {
  const double a = std::abs(s);
  if (a <= xi1_)
    return raw_G1(a);
  return raw_G1(xi1_) + m_ * (a * a - xi1_ * xi1_) / 2;
}

std::string NonlinearitySpec::family_name() const {
  return std::visit(overloaded{[](const PowerFamily &) { return "power"; },
                               [](const CubicQuinticFamily &) {
                                 return "cubic_quintic";
                               },
                               [](const TabulatedFamily &) {
                                 return "tabulated";
                               }},
                    family_);
}

std::map<std::string, double> NonlinearitySpec::parameters() const {
  std::map<std::string, double> out{
      {"m", m_}, {"xi0", xi0_}, {"N", static_cast<double>(dim_N_)}};
  if (std::isfinite(xi1_))
    out["xi1"] = xi1_;
  std::visit(overloaded{[&](const PowerFamily &f) { out["p"] = f.p; },
                        [&](const CubicQuinticFamily &f) {
                          out["a"] = f.a;
                          out["b"] = f.b;
                        },
                        [&](const TabulatedFamily &f) {
                          out["samples"] =
                              static_cast<double>(f.table->knots().size());
                        }},
             family_);
  return out;
}

void NonlinearitySpec::validate() const {
  if (dim_N_ < 3)
    throw ConfigError("dimension N must be >= 3");
  if (!(m_ > 0) || !std::isfinite(m_))
    throw ConfigError(fmt_assumption(
        "(g1)", "mass m must be positive (limsup g(s)/s = -m < 0)"));
  if (!(xi0_ > 0))
    throw ConfigError(fmt_assumption("(g3)", "xi0 must be positive"));

  // (g1): g(s)/s -> -m along s = 2^-k.
  const bool tabulated = std::holds_alternative<TabulatedFamily>(family_);
  const double tol1 = tabulated ? 1e-2 : 1e-6;
  for (int k = 30; k <= 40; ++k) {
    const double s = std::ldexp(1.0, -k);
    const double ratio = raw_g(s) / s;
    if (std::abs(ratio + m_) > tol1 * m_) {
      std::ostringstream msg;
      msg << "g(s)/s = " << ratio << " at s = 2^-" << k
          << " does not approach -m = " << -m_;
      throw ConfigError(fmt_assumption("(g1)", msg.str()));
    }
  }

  // (g2): limsup g(s)/s^{2*-1} <= 0 along s = 2^k. Accept ratios that are
  // already negligible or still strictly decaying at the top of the ladder.
  const double q = critical_exponent() - 1;
  std::vector<double> ratios;
  for (int k = 10; k <= 60; ++k) {
    const double s = std::ldexp(1.0, k);
    ratios.push_back(raw_g(s) / std::pow(s, q));
  }
  const double last = ratios.back();
  if (last > 1e-3) {
    bool decaying = true;
    for (std::size_t i = ratios.size() - 20; i < ratios.size(); ++i)
      decaying = decaying && ratios[i] < ratios[i - 1];
    if (!decaying || last > 0.5 * ratios[ratios.size() - 21]) {
      std::ostringstream msg;
      msg << "g(s)/s^(2*-1) stays at " << last << " for large s (2* = "
          << critical_exponent() << "); growth is critical or supercritical";
      throw ConfigError(fmt_assumption("(g2)", msg.str()));
    }
  }

  // (g3)
  if (!(raw_G(xi0_) > 0)) {
    std::ostringstream msg;
    msg << "G(xi0) = " << raw_G(xi0_) << " is not positive at xi0 = " << xi0_;
    throw ConfigError(fmt_assumption("(g3)", msg.str()));
  }
}

NonlinearitySpec truncate(const NonlinearitySpec &spec) {
  if (spec.truncated_)
    return spec;
  NonlinearitySpec out = spec;
  out.truncated_ = true;

  const double xi0 = spec.xi0_;
  auto g = [&](double s) { return spec.raw_g(s); };

  double top = xi0 * std::ldexp(1.0, 40);
  if (const auto *tab = std::get_if<TabulatedFamily>(&spec.family_))
    top = std::max(xi0, tab->table->back());

  auto bisect = [&](double lo, double hi) {
    // g(lo) > 0 >= g(hi)
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0 ? lo : hi) = mid;
    }
    return hi;
  };

  const double g0 = g(xi0);
  if (g0 == 0.0) {
    out.xi1_ = xi0;
    return out;
  }

  // Geometric scan with 256 sub-steps per octave; the first sign change
  // (or a tangential zero between samples) gives xi1.
  const double ratio = std::exp2(1.0 / 256);
  double prev = xi0, g_prev = g0;
  double prev2 = xi0, g_prev2 = g0;
  for (double s = xi0 * ratio;; s = std::min(s * ratio, top)) {
    const double gs = g(s);
    if (g_prev > 0 && gs <= 0) {
      out.xi1_ = gs == 0 ? s : bisect(prev, s);
      return out;
    }
    if (g_prev < 0 && gs >= 0) {
      // g < 0 at xi0, first zero above it
      double lo = prev, hi = s;
      while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0 ? lo : hi) = mid;
      }
      out.xi1_ = hi;
      return out;
    }
    // Tangential zero: a positive local minimum of g that is numerically 0.
    if (g_prev > 0 && g_prev < g_prev2 && g_prev <= gs) {
      double a = prev2, b = s;
      const double phi = 0.5 * (std::sqrt(5.0) - 1);
      for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
        const double c = b - phi * (b - a), d = a + phi * (b - a);
        (g(c) < g(d) ? b : a) = (g(c) < g(d) ? d : c);
      }
      const double smin = 0.5 * (a + b);
      if (g(smin) <= 1e-12 * std::max(1.0, std::abs(g0))) {
        out.xi1_ = smin;
        return out;
      }
    }
    if (s >= top) {
      if (gs >= 0 && g_prev >= 0) {
        out.xi1_ = std::numeric_limits<double>::infinity();
        return out;
      }
      throw ConfigError("cannot determine truncation level xi1: g is "
                        "negative above xi0 with no zero in the scanned range");
    }
    prev2 = prev;
    g_prev2 = g_prev;
    prev = s;
    g_prev = gs;
  }
}

std::pair<ScalarMap, ScalarMap> split(const NonlinearitySpec &spec) {
  auto shared = std::make_shared<const NonlinearitySpec>(spec);
  return {[shared](double s) { return shared->g1(s); },
          [shared](double s) { return shared->g2(s); }};
}

} // namespace nlsf
