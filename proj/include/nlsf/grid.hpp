#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nlsf {

enum class SectorKind { Radial, BiradialO1, TriradialO2 };

std::string to_string(SectorKind kind);
SectorKind parse_sector_kind(const std::string &name);

struct SymmetrySector {
  SectorKind kind = SectorKind::Radial;
  int dim_N = 3;
  int m_split = 0;
  bool tau_antisym = false;

  /// Throws ConfigError on an inadmissible combination.
  void validate() const;
  int third_dim() const { return dim_N - 2 * m_split; }
};

/// One reduced coordinate axis.
///
/// Radial axes carry nodes on [0, R] with Jacobian r^(k-1); an unreduced
/// line axis carries nodes on [-R, R]. Node weights are the exact integrals
/// of the Jacobian over the dual cells, edge coefficients are the Jacobian
/// at edge midpoints over h.
struct Axis {
  std::string name;
  int k = 1;
  bool line = false;
  double h = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> edges;
  // Free (non-Dirichlet) nodes are [first, last).
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return nodes.size(); }
  std::size_t free_size() const { return last - first; }
};

class ReducedGrid;
using GridPtr = std::shared_ptr<const ReducedGrid>;

/// Symmetry-reduced tensor lattice. Values are stored row-major, the last
/// axis fastest. Immutable once built; the H1 spectral factors are computed
/// on first use.
class ReducedGrid {
public:
  ReducedGrid(SymmetrySector sector, double box_radius, std::size_t nodes);
  ReducedGrid(const ReducedGrid &) = delete;
  ReducedGrid &operator=(const ReducedGrid &) = delete;

  const SymmetrySector &sector() const { return sector_; }
  double box_radius() const { return box_radius_; }
  std::size_t nodes_per_axis() const { return nodes_; }
  const std::vector<Axis> &axes() const { return axes_; }
  std::size_t dims() const { return axes_.size(); }
  std::size_t size() const { return size_; }
  double spacing() const { return axes_.front().h; }
  /// Product of sphere areas |S^(k-1)| over radial axes.
  double sphere_constant() const { return sphere_constant_; }

  const Eigen::VectorXd &weights() const { return weights_; }
  /// 1 at free nodes, 0 on the Dirichlet boundary.
  const Eigen::VectorXd &interior() const { return interior_; }

  std::array<std::size_t, 3> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> idx) const;
  std::vector<double> coordinates(std::size_t flat) const;
  /// Euclidean |x| in R^N of the point represented by a node.
  double radius(std::size_t flat) const;

  /// K u, the stiffness matrix of the Dirichlet form.
  Eigen::VectorXd stiffness(const Eigen::VectorXd &u) const;
  double dirichlet(const Eigen::VectorXd &u, const Eigen::VectorXd &v) const;
  double l2(const Eigen::VectorXd &u, const Eigen::VectorXd &v) const {
    return (weights_.array() * u.array() * v.array()).sum();
  }
  double h1(const Eigen::VectorXd &u, const Eigen::VectorXd &v) const {
    return dirichlet(u, v) + l2(u, v);
  }
  /// Solves (K + W) x = b on the free nodes; b is a dual (integrated)
  /// vector, x vanishes on the boundary.
  Eigen::VectorXd solve_h1(const Eigen::VectorXd &b) const;

  /// True when the first two axes exist and share their node vector.
  bool has_tau() const { return !tau_perm_.empty(); }
  /// Flat index of the node with the first two coordinates swapped.
  const std::vector<std::size_t> &tau_permutation() const { return tau_perm_; }
  /// Index of the unreduced line axis, or -1.
  int line_axis() const;

  bool same_as(const ReducedGrid &other) const;

private:
  struct Spectral {
    std::vector<Eigen::MatrixXd> vectors; // W-orthonormal, free x free
    std::vector<Eigen::VectorXd> values;
  };
  const Spectral &spectral() const;

  SymmetrySector sector_;
  double box_radius_;
  std::size_t nodes_;
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
  double sphere_constant_ = 1;
  Eigen::VectorXd weights_;
  Eigen::VectorXd interior_;
  std::vector<std::size_t> tau_perm_;

  mutable std::once_flag spectral_once_;
  mutable std::unique_ptr<Spectral> spectral_;
};

GridPtr build_grid(const SymmetrySector &sector, double box_radius,
                   std::size_t nodes_per_axis);

/// A function sampled on a grid; values vanish on the Dirichlet boundary.
class Field {
public:
  explicit Field(GridPtr grid);
  Field(GridPtr grid, Eigen::VectorXd values);

  const ReducedGrid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  const Eigen::VectorXd &values() const { return values_; }
  /// Mutable access; callers restore the boundary with `clamp_boundary`.
  Eigen::VectorXd &values() { return values_; }
  void clamp_boundary();
  std::size_t size() const { return values_.size(); }

  Field &operator+=(const Field &o);
  Field &operator-=(const Field &o);
  Field &operator*=(double a);
  friend Field operator+(Field a, const Field &b) { return a += b; }
  friend Field operator-(Field a, const Field &b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

void require_same_grid(const Field &a, const Field &b);

/// Samples f(x) where x holds the reduced coordinates of each node.
Field sample(const GridPtr &grid,
             const std::function<double(std::span<const double>)> &f);
/// Samples f(|x|).
Field sample_radial(const GridPtr &grid, const std::function<double(double)> &f);

struct InnerProducts {
  double l2;
  double dirichlet;
};
InnerProducts inner_products(const Field &u, const Field &v);
double psi(const Field &u);
double h1_norm(const Field &u);

/// -W^{-1} K u at free nodes, 0 on the boundary.
Field laplacian(const Field &u);

/// x -> u(r x) on the same grid by per-axis monotone cubic interpolation;
/// points outside the box read 0.
Field rescale(const Field &u, double r);
/// x -> u(r x) represented exactly: same values on the grid with box R/r.
Field dilate(const Field &u, double r);
/// x -> u(x - dz e_z) along the unreduced z axis.
Field translate_z(const Field &u, double dz);

/// Smoothed indicator of B(0, rho) (linear ramp of width h across the
/// sphere).
Field ball_indicator(const GridPtr &grid, double rho);
double ball_volume(const GridPtr &grid, double rho);
/// Exact volume of the unit ball in R^N times rho^N.
double exact_ball_volume(int dim_N, double rho);

/// Average of u over shells of width h in |x|, as a field.
Field radial_average(const Field &u);

void write_csv(const Field &u, const std::filesystem::path &path);
Field read_csv(const std::filesystem::path &path);

} // namespace nlsf
