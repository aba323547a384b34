#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlsf/functionals.hpp"
#include "nlsf/grid.hpp"
#include "nlsf/nonlinearity.hpp"

namespace nlsf {

struct ArmijoParams {
  double c1 = 1e-4;
  double backtrack = 0.5;
  double step0 = 1.0;
};

struct SolveConfig {
  double tol_grad = 1e-6;
  int max_iters = 20000;
  ArmijoParams armijo;
  double deflation_strength = 0.0;
  /// Stop early when |theta - 1| < theta_tol and grad_norm < 10 tol_grad.
  double theta_tol = 1e-4;
  /// Re-slice through m_P(u) once r(u) leaves [1/ratio, ratio].
  double reslice_ratio = 1.2;
  /// Newton-Krylov iterations after descent (0 disables).
  int newton_iters = 0;
  /// Seeds for deflated multi-start, at most this many (0 = all in P).
  int max_seeds = 0;
  void validate() const;
};

struct SolveReport {
  /// Functionals of m(u*).
  VariationalState state;
  double theta = 0;
  double grad_norm = 0;
  int iters = 0;
  std::vector<double> J_history;
  SymmetrySector sector;
  double residual_pde = 0;
  double pohozaev_residual = 0; // |M| / psi at m(u*)
  std::string stop_reason;
  /// m(u*) represented exactly on the dilated grid.
  std::optional<Field> solution;
  /// The slice representative on the configured grid.
  std::optional<Field> iterate;
};

/// Projected descent of Phi = J o m_P over the Dirichlet sphere through the
/// seed. Stops at grad_norm < tol_grad, or with grad_norm < 100 tol_grad
/// once Phi has stayed constant to 1e-12 for 100 iterations (roundoff floor
/// on fine grids). Throws NotInP for a seed outside P, LeftDomain when no
/// step keeps int G > 0, MaxIters when neither happens.
SolveReport minimize(const Field &seed, const NonlinearitySpec &spec,
                     const SolveConfig &cfg);

/// As minimize, with the penalty
/// delta * sum_j (1/||u - u_j||^2 + 1/||u + u_j||^2) (H1 norms) added to Phi.
SolveReport minimize_penalized(const Field &seed, const NonlinearitySpec &spec,
                               const SolveConfig &cfg,
                               const std::vector<Field> &deflate);

/// Newton-Krylov iteration for a zero of the tangent gradient on the sphere
/// through u (finds saddles as well as minima).
SolveReport newton_polish(const Field &u, const NonlinearitySpec &spec,
                          const SolveConfig &cfg, int max_newton = 30);

/// Descent of J over the nodal Nehari set of X_tau: with v the restriction
/// of u to Omega_1 = {r1 > r2}, the positive and negative parts of v (each
/// extended antisymmetrically) are scaled independently so that
/// J'(u)[piece] = 0. Converges to solutions that change sign inside Omega_1,
/// which are saddles of Phi out of reach of plain descent. Stops when the
/// relative H1 residual drops below `rel_tol`.
SolveReport nodal_descent(const Field &seed, const NonlinearitySpec &spec,
                          const SolveConfig &cfg, double rel_tol = 1e-5);

/// True when the restriction of u to Omega_1 takes both signs beyond
/// `fraction` of its sup norm.
bool changes_sign_in_omega1(const Field &u, double fraction = 0.05);

/// Report for a given representative u with no iteration: functionals of
/// m(u), theta, residuals and the tangent gradient norm at u.
SolveReport summarize(const Field &u, const NonlinearitySpec &spec);

/// Multi-start from sphere_family(k) seeds, deflating earlier solutions.
/// Seeds that change sign in Omega_1 are refined by nodal_descent before the
/// Newton polish. Candidates with residual_pde >= 1e-2 or |theta - 1| >= 5e-2
/// (box-pinned critical points) are dropped. Distinctness is judged modulo
/// sign: u, v count as distinct when min(||u - v||, ||u + v||) >
/// 1e-2 max(||u||, ||v||). Sorted by J.
std::vector<SolveReport> minimize_deflated(const GridPtr &grid,
                                           const NonlinearitySpec &spec,
                                           const SolveConfig &cfg, int k);

/// H1 distance modulo sign between slice representatives.
double distance_mod_sign(const Field &u, const Field &v);

struct LedgerCheck {
  std::string name;
  double value;
  double threshold;
  bool passed;
};

struct VerificationLedger {
  std::vector<LedgerCheck> checks;
  double J = 0;
  double J_omega1 = 0;
  bool all_passed() const;
};

/// Residual suite on report.solution: Pohozaev residual < 1e-4,
/// |theta - 1| < 5e-3, residual_pde < 1e-2; on tau sectors also the
/// Omega_1 split (energy within 1%, Pohozaev residual < 1%) and
/// nonradiality > 0.1.
VerificationLedger verify_solution(const SolveReport &report,
                                   const NonlinearitySpec &spec);

/// Restriction to Omega_1 = {r1 > r2}.
Field restrict_omega1(const Field &u);

/// ||u - radial average|| / ||u|| in L2.
double nonradiality(const Field &u);

} // namespace nlsf
