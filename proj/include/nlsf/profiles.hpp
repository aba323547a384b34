#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlsf/nonlinearity.hpp"

namespace nlsf {

/// Uniform 1-D sampling used by synthetic sequences.
/// Line: nodes x_i = -L + i h on [-L, L], plain 1-D quadrature.
/// Radial: nodes rho_i = i h on [0, L], weight |S^{N-1}| rho^{N-1} h, for
/// radial functions on R^N.
struct AxisLine {
  enum class Kind { Line, Radial };
  Kind kind = Kind::Line;
  double L = 0;
  double h = 0;
  int dim_N = 1; // ambient dimension for Radial; 2* and Psi checks use it

  static AxisLine line(double L, double h);
  static AxisLine radial(int N, double L, double h);

  std::size_t size() const;
  double x(std::size_t i) const;
  /// Quadrature weights.
  Eigen::VectorXd weights() const;
  /// Index of the node at coordinate x (must be a node up to 1e-9 h).
  std::size_t index_of(double x) const;

  /// int |u|^2
  double mass(const Eigen::VectorXd &u) const;
  /// int |u'|^2 (edge differences; radial edges carry the midpoint measure).
  double dirichlet(const Eigen::VectorXd &u) const;
  double integral(const Eigen::VectorXd &u,
                  const std::function<double(double)> &Psi) const;
};


/// u_n = sum_j profile_j(x - y_n^j) + tail_amplitude * n^{-N/2} chi(x / n).
/// On a Line the tail uses N = 1 so its L2 norm stays fixed.
struct SyntheticSequence {
  AxisLine axis;
  std::vector<ScalarMap> profiles;
  /// y_n^j; the first entry may be the stationary profile (center 0).
  std::vector<std::function<double(int)>> centers;
  ScalarMap tail;
  double tail_amplitude = 0;

  Eigen::VectorXd sample(int n) const;
  /// profile_j on the axis, centered at 0.
  Eigen::VectorXd truth(std::size_t j) const;
};

struct ProfileSet {
  AxisLine axis;
  std::vector<int> ladder;
  double r_window = 0;
  double mass_floor = 0;
  /// profiles[0] is u~_0 (possibly ~0); profiles[i], i >= 1, are translated.
  std::vector<Eigen::VectorXd> profiles;
  /// centers[i][k] = y_{n_k}^i, with centers[0] identically 0.
  std::vector<std::vector<double>> centers;
  /// sup_mass[i][k]: windowed sup-mass of v_{n_k}^i.
  std::vector<std::vector<double>> sup_mass;
  /// v_n^K for each n of the ladder.
  std::vector<Eigen::VectorXd> remainder;

  /// Number of profiles with mass int |u~_i|^2 above mass_floor (u~_0
  /// included).
  std::size_t recovered() const;
};

/// Windowed sup-mass sup_y int_{B(y,r)} |u|^2 over node-centered windows,
/// with its argmax (smallest center on ties). Radial axes use windows
/// centered at distance y from the origin and spherical-cap weights.
struct WindowMax {
  double mass;
  double center;
};
WindowMax window_sup_mass(const AxisLine &axis, const Eigen::VectorXd &u,
                          double r);

/// Profile extraction on a Line axis. Centers are the peak of |v| inside the
/// maximizing window (smallest coordinate on ties). mass_floor defaults to
/// 1e-4 sup_n ||u_n||^2. Throws ConfigError on a bad ladder or radius and
/// WindowTooSmall when a profile leaves mass beside its own window.
ProfileSet extract(const SyntheticSequence &seq, const std::vector<int> &ladder,
                   double r_window, std::optional<double> mass_floor = {});

/// Relative L2 error of each truth profile against the extracted profile
/// whose top-of-ladder center is nearest to the truth center.
std::vector<double> recovery_errors(const ProfileSet &ps,
                                    const SyntheticSequence &seq);

struct LedgerRow {
  std::string quantity;
  int i;
  int n;
  double lhs;
  double sum;
  double remainder;
  double defect; // |lhs - sum - remainder| / |lhs|
};

/// Dirichlet and Psi splitting at the top of the ladder for i = 0..K.
/// Throws ConfigError when Psi violates the growth bound
/// Psi(s) <= C (s^2 + |s|^{2*}) at the sample ladders.
std::vector<LedgerRow> splitting_ledger(const ProfileSet &ps,
                                        const ScalarMap &Psi,
                                        const SyntheticSequence &seq);

struct VanishingTrace {
  std::vector<int> ladder;
  std::vector<double> sup_mass;
  std::vector<double> psi_integral;
  bool vanishing;
};

/// Windowed sup-mass and int Psi(u_n) along the ladder; vanishing holds when
/// both decrease monotonically from the ladder midpoint on. Throws
/// ConfigError unless Psi(s)/s^2 -> 0 at 0 and Psi(s)/|s|^{2*} -> 0 at
/// infinity on the sample ladders.
VanishingTrace vanishing_test(const SyntheticSequence &seq,
                              const std::vector<int> &ladder,
                              const ScalarMap &Psi, double r);

struct ThetaLedger {
  std::vector<double> theta;
  double G1_defect = 0;  // |LHS - sum - remainder| / LHS
  double G2_excess = 0;  // max(0, sum - LHS) / LHS, LHS >= sum expected
  double psi_excess = 0; // same for the Dirichlet integral
  double max_theta = 0;
  bool some_theta_ge_one = false;
};

/// theta_i = psi(u~_i)^{-1} int g(u~_i) u~_i (NaN for profiles below
/// mass_floor) and the splitting chain for G1, G2 and psi at the top of the
/// ladder.
ThetaLedger theta_ledger(const ProfileSet &ps, const SyntheticSequence &seq,
                         const NonlinearitySpec &spec);

/// (2 + 2*)/2 for the ambient dimension (N >= 3).
double lions_exponent(int N);

} // namespace nlsf
