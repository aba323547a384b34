#pragma once

#include <limits>
#include <span>
#include <vector>

namespace nlsf {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
///
/// Preserves monotonicity of the data on every interval, which keeps
/// rescaled fields free of spurious over- and undershoots near plateaus.
/// Supports exact integration of the interpolant, used for primitives of
/// tabulated nonlinearities.
class MonotoneCubic {
public:
  MonotoneCubic() = default;

  /// `left_slope` overrides the one-sided slope at the first knot when finite
  /// (radial axes pass 0 to impose even reflection at r = 0).
  MonotoneCubic(std::vector<double> x, std::vector<double> y,
                double left_slope = std::numeric_limits<double>::quiet_NaN());

  double operator()(double t) const;

  /// Integral of the interpolant over [x.front(), t], t clamped into range.
  double integral(double t) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }

private:
  std::size_t locate(double t) const;
  double segment_integral(std::size_t i, double t) const;

  std::vector<double> x_, y_, d_, cumulative_;
};

} // namespace nlsf
