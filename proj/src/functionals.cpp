#include "nlsf/functionals.hpp"

#include <cmath>
#include <sstream>

#include "nlsf/errors.hpp"
#include "nlsf/symmetry.hpp"

namespace nlsf {

namespace {

double integrate(const Field &u, double (NonlinearitySpec::*f)(double) const,
                 const NonlinearitySpec &spec) {
  const auto &w = u.grid().weights();
  const auto &v = u.values();
  double s = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0)
      s += w[i] * (spec.*f)(v[i]);
  return s;
}

int dimension(const Field &u, const NonlinearitySpec &spec) {
  const int N = u.grid().sector().dim_N;
  if (N != spec.dim_N())
    throw ConfigError("nonlinearity dimension does not match the grid sector");
  return N;
}

} // namespace

double integral_G(const Field &u, const NonlinearitySpec &spec) {
  return integrate(u, &NonlinearitySpec::G, spec);
}

Eigen::VectorXd g_dual(const Field &u, const NonlinearitySpec &spec) {
  Eigen::VectorXd out(u.values().size());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = u.grid().weights()[i] * spec.g(u.values()[i]);
  return out.cwiseProduct(u.grid().interior());
}

VariationalState evaluate(const Field &u, const NonlinearitySpec &spec) {
  const double two_star = spec.critical_exponent();
  dimension(u, spec);
  VariationalState s;
  s.psi = psi(u);
  s.intG = integral_G(u, spec);
  s.intG1 = integrate(u, &NonlinearitySpec::G1, spec);
  s.intG2 = integrate(u, &NonlinearitySpec::G2, spec);
  s.J = 0.5 * s.psi - s.intG;
  s.M = s.psi - two_star * s.intG;
  if (s.intG > 0 && s.psi > 0)
    s.r_of_u = std::sqrt(two_star * s.intG / s.psi);
  return s;
}

double retraction_radius(const Field &u, const NonlinearitySpec &spec) {
  dimension(u, spec);
  const double ig = integral_G(u, spec);
  const double ps = psi(u);
  if (!(ig > 0) || !(ps > 0)) {
    std::ostringstream msg;
    msg << "field is outside P (int G = " << ig << ")";
    throw NotInP(msg.str());
  }
  return std::sqrt(spec.critical_exponent() * ig / ps);
}

Field retract(const Field &u, const NonlinearitySpec &spec) {
  return rescale(u, retraction_radius(u, spec));
}

Field retract_exact(const Field &u, const NonlinearitySpec &spec) {
  return dilate(u, retraction_radius(u, spec));
}

Field invert_m(const Field &u) {
  const double ps = psi(u);
  if (!(ps > 0))
    throw std::invalid_argument("invert_m of the zero field");
  const int N = u.grid().sector().dim_N;
  return rescale(u, std::pow(ps, 1.0 / (N - 2)));
}

double phi(const Field &u, const NonlinearitySpec &spec) {
  const int N = dimension(u, spec);
  const double r = retraction_radius(u, spec);
  return std::pow(r, 2 - N) * psi(u) / N;
}

TangentGradient tangent_gradient(const Field &u,
                                 const NonlinearitySpec &spec) {
  const int N = dimension(u, spec);
  const auto &g = u.grid();
  const double r = retraction_radius(u, spec);
  const double ps = psi(u);

  const Eigen::VectorXd Ku = g.stiffness(u.values());
  const Eigen::VectorXd b =
      std::pow(r, 2 - N) * Ku - std::pow(r, -N) * g_dual(u, spec);
  Eigen::VectorXd x = g.solve_h1(b);
  const Eigen::VectorXd n = g.solve_h1(Ku);
  x -= (Ku.dot(x) / Ku.dot(n)) * n;

  Field grad(u.grid_ptr(), std::move(x));
  if (g.sector().tau_antisym)
    grad = project_tau(grad);
  const double norm = h1_norm(grad);
  return {std::move(grad), norm, std::pow(r, 2 - N) * ps / N, r};
}

Field project_tangent(const Field &u, const Field &v) {
  require_same_grid(u, v);
  const auto &g = u.grid();
  const Eigen::VectorXd Ku = g.stiffness(u.values());
  const Eigen::VectorXd n = g.solve_h1(Ku);
  Field out(u.grid_ptr(), v.values() - (Ku.dot(v.values()) / Ku.dot(n)) * n);
  if (g.sector().tau_antisym)
    out = project_tau(out);
  return out;
}

TangentGradient gradient_JM(const Field &u, const NonlinearitySpec &spec) {
  const double ps = psi(u);
  if (std::abs(ps - 1) > 1e-6) {
    std::ostringstream msg;
    msg << "field is not on the unit Dirichlet sphere (psi = " << ps << ")";
    throw NotInU(msg.str());
  }
  if (!(integral_G(u, spec) > 0))
    throw NotInU("field has int G <= 0");
  return tangent_gradient(u, spec);
}

double theta(const Field &u, const NonlinearitySpec &spec) {
  const double ps = psi(u);
  if (!(ps > 0))
    throw std::invalid_argument("theta of the zero field");
  return g_dual(u, spec).dot(u.values()) / ps;
}

double residual_pde(const Field &u, const NonlinearitySpec &spec) {
  const auto &g = u.grid();
  const Eigen::VectorXd res = g.stiffness(u.values()) - g_dual(u, spec);
  const double norm_u = h1_norm(u);
  if (!(norm_u > 0))
    throw std::invalid_argument("residual of the zero field");
  return std::sqrt(std::max(0.0, res.dot(g.solve_h1(res)))) / norm_u;
}

} // namespace nlsf
