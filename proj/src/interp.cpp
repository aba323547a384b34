#include "nlsf/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsf {

namespace {

double sign(double v) { return (v > 0) - (v < 0); }

// Three-point end slope, clipped so the end interval stays monotone.
double end_slope(double h0, double h1, double del0, double del1) {
  double d = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
  if (sign(d) != sign(del0))
    d = 0;
  else if (sign(del0) != sign(del1) && std::abs(d) > std::abs(3 * del0))
    d = 3 * del0;
  return d;
}

} // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y,
                             double left_slope)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw std::invalid_argument("MonotoneCubic: need >= 2 matching samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("MonotoneCubic: knots must increase");

  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    del[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = del[0];
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (sign(del[i - 1]) * sign(del[i]) > 0) {
        const double w1 = 2 * h[i] + h[i - 1];
        const double w2 = h[i] + 2 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
      }
    }
    d_[0] = end_slope(h[0], h[1], del[0], del[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  }
  if (std::isfinite(left_slope))
    d_[0] = left_slope;

  cumulative_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    cumulative_[i + 1] = cumulative_[i] + segment_integral(i, x_[i + 1]);
}

std::size_t MonotoneCubic::locate(double t) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double MonotoneCubic::operator()(double t) const {
  const std::size_t i = locate(t);
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * d_[i] +
         (-2 * s3 + 3 * s2) * y_[i + 1] + (s3 - s2) * h * d_[i + 1];
}

double MonotoneCubic::segment_integral(std::size_t i, double t) const {
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  // Antiderivatives of the Hermite basis in the local coordinate.
  const double a00 = s4 / 2 - s3 + s;
  const double a10 = s4 / 4 - 2 * s3 / 3 + s2 / 2;
  const double a01 = -s4 / 2 + s3;
  const double a11 = s4 / 4 - s3 / 3;
  return h * (a00 * y_[i] + a10 * h * d_[i] + a01 * y_[i + 1] +
              a11 * h * d_[i + 1]);
}

double MonotoneCubic::integral(double t) const {
  t = std::clamp(t, x_.front(), x_.back());
  const std::size_t i = locate(t);
  return cumulative_[i] + segment_integral(i, t);
}

} // namespace nlsf
