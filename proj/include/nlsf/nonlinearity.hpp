#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlsf/interp.hpp"

namespace nlsf {

using ScalarMap = std::function<double(double)>;

/// g(s) = -m s + |s|^{p-2} s with 2 < p < 2*.
struct PowerFamily {
  double p;
};

/// g(s) = -m s + a s^3 - b s^5.
struct CubicQuinticFamily {
  double a;
  double b;
};

/// g sampled at s >= 0, monotone-cubic interpolation in between, held
/// constant beyond the last sample and extended oddly to s < 0.
struct TabulatedFamily {
  std::shared_ptr<const MonotoneCubic> table;
};

using Family = std::variant<PowerFamily, CubicQuinticFamily, TabulatedFamily>;

/// A Berestycki-Lions nonlinearity g together with its constants.
///
/// Immutable after construction. The factories run the sampled (g0)-(g3)
/// checks and throw ConfigError naming the violated assumption. After
/// `truncate`, evaluation returns the modified nonlinearity that vanishes
/// above xi1 (odd extension below zero).
class NonlinearitySpec {
public:
  static NonlinearitySpec power(double m, double p, double xi0, int dim_N);
  static NonlinearitySpec cubic_quintic(double m, double a, double b,
                                        double xi0, int dim_N);
  static NonlinearitySpec tabulated(std::vector<double> s,
                                    std::vector<double> g, double m,
                                    double xi0, int dim_N);
  /// Two-column CSV of (s, g(s)); lines starting with '#' and a non-numeric
  /// header row are skipped.
  static NonlinearitySpec from_csv(const std::filesystem::path &path, double m,
                                   double xi0, int dim_N);

  double g(double s) const;
  /// G(s) = int_0^s g; closed form for built-in families.
  double G(double s) const;

  /// g1(s) = max{g(s) + m s, 0} on s >= 0, odd below.
  double g1(double s) const;
  double g2(double s) const { return g1(s) - g(s); }
  double G1(double s) const;
  double G2(double s) const { return G1(s) - G(s); }

  double m() const { return m_; }
  double xi0() const { return xi0_; }
  /// +infinity when no truncation applies (or before `truncate`).
  double xi1() const { return xi1_; }
  bool truncated() const { return truncated_; }
  int dim_N() const { return dim_N_; }
  /// 2* = 2N/(N-2).
  double critical_exponent() const {
    return 2.0 * dim_N_ / (dim_N_ - 2.0);
  }

  const Family &family() const { return family_; }
  std::string family_name() const;
  /// Family parameters for manifests and reports.
  std::map<std::string, double> parameters() const;

private:
  NonlinearitySpec(Family family, double m, double xi0, int dim_N)
      : family_(std::move(family)), m_(m), xi0_(xi0), dim_N_(dim_N) {}

  void validate() const;

  // Untruncated g and G on s >= 0.
  double raw_g(double s) const;
  double raw_G(double s) const;
  double raw_G1(double s) const;

  Family family_;
  double m_;
  double xi0_;
  int dim_N_;
  double xi1_ = std::numeric_limits<double>::infinity();
  bool truncated_ = false;
  // Cumulative G1 at table knots (tabulated family only).
  std::shared_ptr<const std::vector<double>> g1_knots_;

  friend NonlinearitySpec truncate(const NonlinearitySpec &spec);
};

/// Replaces g by the modification that vanishes above
/// xi1 = inf{xi >= xi0 : g(xi) = 0}; unchanged when g >= 0 on [xi0, inf).
/// Throws ConfigError when g turns negative above xi0 without a zero in the
/// scanned range.
NonlinearitySpec truncate(const NonlinearitySpec &spec);

/// The decomposition g = g1 - g2 of a truncated nonlinearity.
std::pair<ScalarMap, ScalarMap> split(const NonlinearitySpec &spec);

inline double primitive(const NonlinearitySpec &spec, double s) {
  return spec.G(s);
}

} // namespace nlsf
