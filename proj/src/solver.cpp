#include "nlsf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlsf/errors.hpp"
#include "nlsf/symmetry.hpp"

namespace nlsf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kStagnant = 100;

void enforce_symmetry(Field &u) {
  if (u.grid().sector().tau_antisym)
    u = project_tau(u);
}

// Back onto the sphere {psi = c} by amplitude scaling.
Field to_sphere(Field u, double c) {
  const double ps = psi(u);
  u *= std::sqrt(c / ps);
  return u;
}

class Objective {
public:
  Objective(const NonlinearitySpec &spec, double delta,
            const std::vector<Field> &deflate)
      : spec_(spec), delta_(delta), deflate_(deflate) {}

  double value(const Field &u) const {
    double v = phi(u, spec_);
    if (delta_ > 0)
      for (const auto &w : deflate_) {
        v += delta_ / sq_dist(u, w, -1) + delta_ / sq_dist(u, w, 1);
      }
    return v;
  }

  TangentGradient gradient(const Field &u) const {
    auto tg = tangent_gradient(u, spec_);
    if (delta_ > 0 && !deflate_.empty()) {
      Field p(u.grid_ptr());
      for (const auto &w : deflate_)
        for (double s : {-1.0, 1.0}) {
          const double d2 = sq_dist(u, w, s);
          Field diff = u;
          diff += s * w;
          p += (-2 * delta_ / (d2 * d2)) * diff;
        }
      tg.grad += project_tangent(u, p);
      tg.norm = h1_norm(tg.grad);
      tg.phi = value(u);
    }
    return tg;
  }

private:
  static double sq_dist(const Field &u, const Field &w, double sign) {
    Field d = u;
    d += sign * w;
    return u.grid().h1(d.values(), d.values());
  }

  const NonlinearitySpec &spec_;
  double delta_;
  const std::vector<Field> &deflate_;
};

SolveReport finish(const Field &u, const NonlinearitySpec &spec,
                   SolveReport rep) {
  rep.sector = u.grid().sector();
  Field sol = retract_exact(u, spec);
  rep.state = evaluate(sol, spec);
  rep.theta = theta(sol, spec);
  rep.residual_pde = residual_pde(sol, spec);
  rep.pohozaev_residual = std::abs(rep.state.M) / rep.state.psi;
  rep.solution = std::move(sol);
  rep.iterate = u;
  return rep;
}

SolveReport descend(const Field &seed, const NonlinearitySpec &spec,
                    const SolveConfig &cfg, const std::vector<Field> &deflate,
                    bool throw_on_max) {
  cfg.validate();
  Field u = seed;
  enforce_symmetry(u);
  // Start on the slice through m_P(seed); throws NotInP outside P.
  u = retract(u, spec);
  enforce_symmetry(u);
  if (!(integral_G(u, spec) > 0))
    throw NotInP("seed leaves P after retraction");
  double c = psi(u);
  const Objective obj(spec, cfg.deflation_strength, deflate);

  SolveReport rep;
  auto tg = obj.gradient(u);
  double f = obj.value(u);
  rep.J_history.push_back(phi(u, spec));
  double step = cfg.armijo.step0;
  double reslice_at = std::log(cfg.reslice_ratio);

  for (rep.iters = 0;; ++rep.iters) {
    if (tg.norm < cfg.tol_grad) {
      rep.stop_reason = "grad_norm < tol_grad";
      break;
    }
    if (tg.norm < 10 * cfg.tol_grad &&
        std::abs(theta(u, spec) / (tg.r * tg.r) - 1) < cfg.theta_tol) {
      rep.stop_reason = "|theta - 1| < theta_tol";
      break;
    }
    // Fine grids put a roundoff floor under grad_norm a little above
    // tol_grad; stop once Phi has not moved for kStagnant iterations.
    if (tg.norm < 100 * cfg.tol_grad && rep.J_history.size() > kStagnant) {
      const double now = rep.J_history.back();
      const double then = rep.J_history[rep.J_history.size() - 1 - kStagnant];
      if (std::abs(then - now) <= 1e-12 * std::abs(now)) {
        rep.stop_reason = "J stagnant at roundoff";
        break;
      }
    }
    if (rep.iters >= cfg.max_iters) {
      if (throw_on_max) {
        std::ostringstream msg;
        msg << "no convergence in " << cfg.max_iters
            << " iterations (grad_norm = " << tg.norm << ")";
        throw MaxIters(msg.str());
      }
      rep.stop_reason = "max_iters";
      break;
    }

    const double slope = tg.norm * tg.norm;
    double t = step;
    bool accepted = false;
    bool stalled = false;
    Field trial(u.grid_ptr());
    TangentGradient trial_grad = tg;
    double f_trial = f;
    while (!accepted) {
      if (t < 1e-14 * cfg.armijo.step0) {
        stalled = true;
        break;
      }
      trial = u - t * tg.grad;
      enforce_symmetry(trial);
      trial = to_sphere(trial, c);
      if (!(integral_G(trial, spec) > 0)) {
        t *= cfg.armijo.backtrack;
        continue;
      }
      f_trial = obj.value(trial);
      if (f_trial <= f - cfg.armijo.c1 * t * slope) {
        trial_grad = obj.gradient(trial);
        accepted = true;
      } else if (cfg.armijo.c1 * t * slope < 64 * kEps * std::abs(f) &&
                 f_trial <= f + 64 * kEps * std::abs(f)) {
        // The sufficient decrease is below the resolution of f; accept on a
        // decrease of the gradient norm instead.
        trial_grad = obj.gradient(trial);
        if (trial_grad.norm < tg.norm)
          accepted = true;
        else
          t *= cfg.armijo.backtrack;
      } else {
        t *= cfg.armijo.backtrack;
      }
    }
    if (stalled) {
      if (tg.norm < 100 * cfg.tol_grad &&
          cfg.armijo.c1 * t * slope < 64 * kEps * std::abs(f)) {
        rep.stop_reason = "line search at roundoff";
        break;
      }
      std::ostringstream msg;
      msg << "line search cannot keep int G > 0 with a decrease (grad_norm = "
          << tg.norm << ")";
      throw LeftDomain(msg.str());
    }
    u = std::move(trial);
    tg = std::move(trial_grad);
    f = f_trial;
    step = std::min(2 * t, 1e6 * cfg.armijo.step0);

    if (std::abs(std::log(tg.r)) > reslice_at) {
      Field cand = rescale(u, tg.r);
      enforce_symmetry(cand);
      if (integral_G(cand, spec) > 0 && obj.value(cand) <= f) {
        u = std::move(cand);
        c = psi(u);
        tg = obj.gradient(u);
        f = obj.value(u);
        reslice_at = std::log(cfg.reslice_ratio);
      } else {
        reslice_at *= 2;
      }
    }
    rep.J_history.push_back(phi(u, spec));
  }
  rep.grad_norm = cfg.deflation_strength > 0 && !deflate.empty()
                      ? tangent_gradient(u, spec).norm
                      : tg.norm;
  return finish(u, spec, std::move(rep));
}

// GMRES in the H1 inner product for A x = b on the tangent space.
template <class Op>
Field gmres(const Op &A, const Field &b, int max_iters, double rel_tol) {
  const auto &g = b.grid();
  auto dot = [&](const Field &x, const Field &y) {
    return g.h1(x.values(), y.values());
  };
  const double beta = std::sqrt(dot(b, b));
  Field x(b.grid_ptr());
  if (beta == 0)
    return x;
  std::vector<Field> V{(1 / beta) * b};
  Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(max_iters + 1, max_iters);
  int k = 0;
  Eigen::VectorXd y;
  for (; k < max_iters; ++k) {
    Field w = A(V[static_cast<std::size_t>(k)]);
    for (int j = 0; j <= k; ++j) {
      Hm(j, k) = dot(w, V[static_cast<std::size_t>(j)]);
      w -= Hm(j, k) * V[static_cast<std::size_t>(j)];
    }
    Hm(k + 1, k) = std::sqrt(dot(w, w));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 2);
    rhs[0] = beta;
    y = Hm.topLeftCorner(k + 2, k + 1).colPivHouseholderQr().solve(rhs);
    const double res =
        (rhs - Hm.topLeftCorner(k + 2, k + 1) * y).norm() / beta;
    if (res < rel_tol || Hm(k + 1, k) < 1e-14 * beta) {
      ++k;
      break;
    }
    V.push_back((1 / Hm(k + 1, k)) * w);
  }
  for (int j = 0; j < y.size(); ++j)
    x += y[j] * V[static_cast<std::size_t>(j)];
  return x;
}

struct NodalPieces {
  Field plus;
  Field minus;
};

// Positive and negative parts of u on Omega_1, extended antisymmetrically.
NodalPieces nodal_pieces(const Field &u) {
  const auto &g = u.grid();
  const auto &perm = g.tau_permutation();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(u.values().size());
  Eigen::VectorXd b = a;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto mi = g.multi_index(p);
    if (mi[0] <= mi[1])
      continue;
    const auto ip = static_cast<Eigen::Index>(p);
    const auto iq = static_cast<Eigen::Index>(perm[p]);
    const double v = u.values()[ip];
    (v > 0 ? a : b)[ip] = v;
    (v > 0 ? a : b)[iq] = -v;
  }
  return {Field(u.grid_ptr(), std::move(a)), Field(u.grid_ptr(), std::move(b))};
}

// int g(s P) P
double g_moment(const Field &P, double s, const NonlinearitySpec &spec) {
  const auto &w = P.grid().weights();
  const auto &v = P.values();
  double acc = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0)
      acc += w[i] * spec.g(s * v[i]) * v[i];
  return acc;
}

// Root s > 0 of s D + c - int g(s P) P, with c >= 0 and superlinear g.
double nehari_scale(const Field &P, double D, double c,
                    const NonlinearitySpec &spec) {
  auto h = [&](double s) { return D + c / s - g_moment(P, s, spec) / s; };
  double lo = 1, hi = 1;
  for (int i = 0; h(lo) <= 0; ++i, lo /= 2)
    if (i > 60)
      throw LeftDomain("nodal piece has no Nehari scaling");
  for (int i = 0; h(hi) >= 0; ++i, hi *= 2)
    if (i > 60)
      throw LeftDomain("nodal piece has no Nehari scaling");
  while (hi - lo > 1e-14 * hi) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi)
      break;
    (h(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// sA + tB with J'(sA + tB)[A] = J'(sA + tB)[B] = 0.
Field nehari_project(const NodalPieces &pc, const NonlinearitySpec &spec) {
  const auto &g = pc.plus.grid();
  const double Daa = g.dirichlet(pc.plus.values(), pc.plus.values());
  const double Dbb = g.dirichlet(pc.minus.values(), pc.minus.values());
  const double Dab = g.dirichlet(pc.plus.values(), pc.minus.values());
  if (!(Daa > 0) || !(Dbb > 0))
    throw LeftDomain("a nodal piece vanished");
  double s = nehari_scale(pc.plus, Daa, 0, spec);
  double t = nehari_scale(pc.minus, Dbb, 0, spec);
  for (int it = 0; it < 50; ++it) {
    const double s_new = nehari_scale(pc.plus, Daa, std::max(0.0, t * Dab), spec);
    const double t_new =
        nehari_scale(pc.minus, Dbb, std::max(0.0, s_new * Dab), spec);
    const bool done = std::abs(s_new - s) < 1e-13 * s &&
                      std::abs(t_new - t) < 1e-13 * t;
    s = s_new;
    t = t_new;
    if (done)
      break;
  }
  return s * pc.plus + t * pc.minus;
}

double action(const Field &u, const NonlinearitySpec &spec) {
  return 0.5 * psi(u) - integral_G(u, spec);
}

} // namespace

void SolveConfig::validate() const {
  if (!(tol_grad > 0))
    throw ConfigError("tol_grad must be positive");
  if (!(armijo.backtrack > 0 && armijo.backtrack < 1))
    throw ConfigError("armijo backtrack must lie in (0, 1)");
  if (!(armijo.c1 > 0 && armijo.c1 < 1))
    throw ConfigError("armijo c1 must lie in (0, 1)");
  if (!(armijo.step0 > 0))
    throw ConfigError("armijo step0 must be positive");
  if (deflation_strength < 0)
    throw ConfigError("deflation_strength must be >= 0");
  if (max_iters < 0)
    throw ConfigError("max_iters must be >= 0");
  if (!(reslice_ratio > 1))
    throw ConfigError("reslice_ratio must exceed 1");
}

SolveReport minimize(const Field &seed, const NonlinearitySpec &spec,
                     const SolveConfig &cfg) {
  static const std::vector<Field> none;
  SolveConfig plain = cfg;
  plain.deflation_strength = 0;
  auto rep = descend(seed, spec, plain, none, true);
  if (cfg.newton_iters > 0 && rep.grad_norm >= cfg.tol_grad) {
    auto polished = newton_polish(*rep.iterate, spec, cfg, cfg.newton_iters);
    polished.J_history.insert(polished.J_history.begin(),
                              rep.J_history.begin(), rep.J_history.end());
    polished.iters += rep.iters;
    return polished;
  }
  return rep;
}

SolveReport minimize_penalized(const Field &seed, const NonlinearitySpec &spec,
                               const SolveConfig &cfg,
                               const std::vector<Field> &deflate) {
  return descend(seed, spec, cfg, deflate, false);
}

SolveReport newton_polish(const Field &start, const NonlinearitySpec &spec,
                          const SolveConfig &cfg, int max_newton) {
  Field u = start;
  enforce_symmetry(u);
  const double c = psi(u);
  SolveReport rep;
  auto tg = tangent_gradient(u, spec);
  rep.J_history.push_back(tg.phi);

  for (rep.iters = 0; rep.iters < max_newton && tg.norm >= cfg.tol_grad;
       ++rep.iters) {
    const double unorm = h1_norm(u);
    auto hess = [&](const Field &v) {
      const double vn = h1_norm(v);
      if (vn == 0)
        return Field(v.grid_ptr());
      const double eps = 1e-6 * unorm / vn;
      Field plus = to_sphere(u + eps * v, c);
      Field minus = to_sphere(u - eps * v, c);
      Field d = tangent_gradient(plus, spec).grad -
                tangent_gradient(minus, spec).grad;
      d *= 1 / (2 * eps);
      return project_tangent(u, d);
    };
    Field s = gmres(hess, -1.0 * tg.grad, 60, 1e-4);

    // Backtrack on the gradient norm.
    double alpha = 1;
    bool moved = false;
    for (int b = 0; b < 30; ++b, alpha *= 0.5) {
      Field trial = to_sphere(u + alpha * s, c);
      enforce_symmetry(trial);
      if (!(integral_G(trial, spec) > 0))
        continue;
      auto tt = tangent_gradient(trial, spec);
      if (tt.norm < (1 - 1e-4 * alpha) * tg.norm) {
        u = std::move(trial);
        tg = std::move(tt);
        moved = true;
        break;
      }
    }
    if (!moved) {
      rep.stop_reason = "newton step rejected";
      break;
    }
    rep.J_history.push_back(tg.phi);
  }
  if (rep.stop_reason.empty())
    rep.stop_reason = tg.norm < cfg.tol_grad ? "grad_norm < tol_grad"
                                             : "newton iteration limit";
  rep.grad_norm = tg.norm;
  return finish(u, spec, std::move(rep));
}

bool changes_sign_in_omega1(const Field &u, double fraction) {
  const auto &g = u.grid();
  if (!g.has_tau())
    return false;
  double hi = 0, lo = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto mi = g.multi_index(p);
    if (mi[0] <= mi[1])
      continue;
    const double v = u.values()[static_cast<Eigen::Index>(p)];
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  const double sup = std::max(hi, -lo);
  return sup > 0 && hi > fraction * sup && -lo > fraction * sup;
}

SolveReport nodal_descent(const Field &seed, const NonlinearitySpec &spec,
                          const SolveConfig &cfg, double rel_tol) {
  cfg.validate();
  if (!seed.grid().sector().tau_antisym || !seed.grid().has_tau())
    throw ConfigError("nodal descent needs a tau-antisymmetric sector");
  Field u = project_tau(seed);
  if (!changes_sign_in_omega1(u, 0.0))
    throw ConfigError("nodal descent seed does not change sign in Omega_1");
  u = nehari_project(nodal_pieces(u), spec);
  const auto &g = u.grid();

  SolveReport rep;
  double J = action(u, spec);
  rep.J_history.push_back(J);
  double step = cfg.armijo.step0;
  for (rep.iters = 0; rep.iters < cfg.max_iters; ++rep.iters) {
    const Eigen::VectorXd res = g.stiffness(u.values()) - g_dual(u, spec);
    Field d = project_tau(Field(u.grid_ptr(), g.solve_h1(res)));
    const double slope = res.dot(d.values());
    rep.grad_norm = std::sqrt(std::max(0.0, slope)) / h1_norm(u);
    if (rep.grad_norm < rel_tol) {
      rep.stop_reason = "relative residual < tol";
      break;
    }
    double t = step;
    bool accepted = false;
    while (!accepted && t > 1e-12 * cfg.armijo.step0) {
      try {
        Field trial = nehari_project(nodal_pieces(u - t * d), spec);
        const double Jt = action(trial, spec);
        if (Jt <= J - cfg.armijo.c1 * t * slope) {
          u = std::move(trial);
          J = Jt;
          accepted = true;
          break;
        }
      } catch (const LeftDomain &) {
      }
      t *= cfg.armijo.backtrack;
    }
    if (!accepted) {
      rep.stop_reason = "line search stalled";
      break;
    }
    step = std::min(2 * t, 1e6 * cfg.armijo.step0);
    rep.J_history.push_back(J);
  }
  if (rep.stop_reason.empty())
    rep.stop_reason = "max_iters";
  return finish(u, spec, std::move(rep));
}

SolveReport summarize(const Field &u, const NonlinearitySpec &spec) {
  SolveReport rep;
  rep.grad_norm = tangent_gradient(u, spec).norm;
  rep.stop_reason = "summary";
  return finish(u, spec, std::move(rep));
}

double distance_mod_sign(const Field &u, const Field &v) {
  require_same_grid(u, v);
  Field a = u - v, b = u + v;
  return std::min(h1_norm(a), h1_norm(b));
}

std::vector<SolveReport> minimize_deflated(const GridPtr &grid,
                                           const NonlinearitySpec &spec,
                                           const SolveConfig &cfg, int k) {
  if (grid->sector().kind != SectorKind::TriradialO2 ||
      !grid->sector().tau_antisym)
    throw ConfigError("deflated search needs the TriradialO2 + tau sector");
  const auto samples = sphere_family(k, grid, spec);

  std::vector<SolveReport> found;
  std::vector<Field> on_M; // retracted slice representatives
  int tried = 0;
  for (std::size_t i = 0; i < samples.size(); i += 2) {
    // Antipodal samples give the negated solutions.
    const auto &s = samples[i].in_P ? samples[i] : samples[i + 1];
    if (!s.in_P)
      continue;
    if (cfg.max_seeds > 0 && tried >= cfg.max_seeds)
      break;
    ++tried;
    try {
      SolveReport rep;
      if (on_M.empty()) {
        rep = minimize(s.field, spec, cfg);
      } else if (changes_sign_in_omega1(s.field)) {
        auto nod = nodal_descent(s.field, spec, cfg);
        rep = newton_polish(retract(*nod.iterate, spec), spec, cfg,
                            std::max(cfg.newton_iters, 20));
        rep.J_history.insert(rep.J_history.begin(), nod.J_history.begin(),
                             nod.J_history.end());
        rep.iters += nod.iters;
      } else {
        auto pen = minimize_penalized(s.field, spec, cfg, on_M);
        rep = cfg.newton_iters > 0
                  ? newton_polish(*pen.iterate, spec, cfg, cfg.newton_iters)
                  : minimize(*pen.iterate, spec, cfg);
        rep.J_history.insert(rep.J_history.begin(), pen.J_history.begin(),
                             pen.J_history.end());
        rep.iters += pen.iters;
      }
      if (rep.grad_norm >= 100 * cfg.tol_grad || rep.residual_pde >= 1e-2 ||
          std::abs(rep.theta - 1) >= 5e-2)
        continue;
      Field rep_M = retract(*rep.iterate, spec);
      bool distinct = true;
      for (const auto &w : on_M) {
        const double scale = std::max(h1_norm(rep_M), h1_norm(w));
        distinct = distinct && distance_mod_sign(rep_M, w) > 1e-2 * scale;
      }
      if (distinct) {
        on_M.push_back(std::move(rep_M));
        found.push_back(std::move(rep));
      }
    } catch (const Error &) {
      continue;
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const SolveReport &a, const SolveReport &b) {
                     return a.state.J < b.state.J;
                   });
  return found;
}

Field restrict_omega1(const Field &u) {
  const auto &g = u.grid();
  if (g.dims() < 2)
    throw ConfigError("Omega_1 = {r1 > r2} needs two radial axes");
  Eigen::VectorXd v = u.values();
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto mi = g.multi_index(p);
    if (mi[0] < mi[1])
      v[static_cast<Eigen::Index>(p)] = 0.0;
    else if (mi[0] == mi[1])
      v[static_cast<Eigen::Index>(p)] *= 0.5;
  }
  return Field(u.grid_ptr(), std::move(v));
}

double nonradiality(const Field &u) {
  const Field avg = radial_average(u);
  const Field d = u - avg;
  const double n = inner_products(u, u).l2;
  return std::sqrt(inner_products(d, d).l2 / n);
}

bool VerificationLedger::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const LedgerCheck &c) { return c.passed; });
}

VerificationLedger verify_solution(const SolveReport &report,
                                   const NonlinearitySpec &spec) {
  if (!report.solution)
    throw std::invalid_argument("report carries no solution field");
  const Field &u = *report.solution;
  VerificationLedger L;
  auto add = [&](std::string name, double value, double threshold) {
    L.checks.push_back({std::move(name), value, threshold, value < threshold});
  };
  const auto st = evaluate(u, spec);
  L.J = st.J;
  add("pohozaev_residual", std::abs(st.M) / st.psi, 1e-4);
  add("theta_minus_one", std::abs(theta(u, spec) - 1), 5e-3);
  add("residual_pde", residual_pde(u, spec), 1e-2);

  // Sign-changing checks only apply where X_tau is the ambient space.
  if (u.grid().dims() >= 2 && u.grid().has_tau() &&
      u.grid().sector().tau_antisym) {
    const Field half = restrict_omega1(u);
    const auto hs = evaluate(half, spec);
    L.J_omega1 = hs.J;
    add("omega_split_energy", std::abs(hs.J - st.J / 2) / (st.J / 2), 1e-2);
    add("omega_split_pohozaev", std::abs(hs.M) / hs.psi, 1e-2);
    const double nr = nonradiality(u);
    L.checks.push_back({"nonradiality", nr, 0.1, nr > 0.1});
  }
  return L;
}

} // namespace nlsf
