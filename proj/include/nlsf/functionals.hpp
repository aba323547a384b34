#pragma once

#include <optional>

#include "nlsf/grid.hpp"
#include "nlsf/nonlinearity.hpp"

namespace nlsf {

struct VariationalState {
  double J = 0;
  double M = 0;
  double psi = 0;
  double intG = 0;
  double intG1 = 0;
  double intG2 = 0;
  /// (2* intG / psi)^{1/2}, present iff intG > 0.
  std::optional<double> r_of_u;
};

VariationalState evaluate(const Field &u, const NonlinearitySpec &spec);

double integral_G(const Field &u, const NonlinearitySpec &spec);
/// W g(u): the dual vector v -> int g(u) v.
Eigen::VectorXd g_dual(const Field &u, const NonlinearitySpec &spec);

/// r(u); throws NotInP when intG(u) <= 0.
double retraction_radius(const Field &u, const NonlinearitySpec &spec);

/// m_P(u) = u(r(u) .) resampled on the same grid.
Field retract(const Field &u, const NonlinearitySpec &spec);
/// m_P(u) represented exactly on the dilated grid (box R / r(u)).
Field retract_exact(const Field &u, const NonlinearitySpec &spec);
/// u(psi(u)^{1/(N-2)} .) resampled on the same grid.
Field invert_m(const Field &u);

/// Phi(u) = J(m_P(u)) = r^{2-N} psi(u) / N, from the exact scaling laws.
double phi(const Field &u, const NonlinearitySpec &spec);

struct TangentGradient {
  Field grad;
  double norm;
  double phi;
  double r;
};

/// H1-Riesz representative of dPhi(u), projected H1-orthogonally onto the
/// tangent space of the Dirichlet sphere {psi = psi(u)} and onto X_tau when
/// the sector asks for it. Valid on any such sphere; Phi is invariant under
/// dilation so the sphere radius only sets the scale.
TangentGradient tangent_gradient(const Field &u, const NonlinearitySpec &spec);

/// H1-orthogonal projection of v onto the tangent space of {psi = psi(u)},
/// followed by the tau projection when the sector asks for it.
Field project_tangent(const Field &u, const Field &v);

/// tangent_gradient restricted to U = {psi = 1, intG > 0}; throws NotInU.
TangentGradient gradient_JM(const Field &u, const NonlinearitySpec &spec);

/// psi(u)^{-1} int g(u) u.
double theta(const Field &u, const NonlinearitySpec &spec);

/// ||K u - W g(u)||_{H^-1} / ||u||_{H1}.
double residual_pde(const Field &u, const NonlinearitySpec &spec);

} // namespace nlsf
