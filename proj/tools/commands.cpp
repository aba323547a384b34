#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include <nlsf/errors.hpp>
#include <nlsf/oracle.hpp>
#include <nlsf/profiles.hpp>
#include <nlsf/solver.hpp>
#include <nlsf/symmetry.hpp>

#include "report.hpp"

namespace nlsf::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare(const fs::path &dir) {
  fs::create_directories(dir);
  return dir;
}

json solution_entry(const SolveReport &rep, const NonlinearitySpec &spec,
                    const RunConfig &cfg, std::size_t i) {
  json e;
  e["report"] = to_json(rep);
  e["ledger"] = to_json(verify_solution(rep, spec));
  if (cfg.write_field) {
    const std::string field = "field_" + std::to_string(i) + ".csv";
    const std::string sol = "solution_" + std::to_string(i) + ".csv";
    write_csv(*rep.iterate, cfg.out_dir / field);
    write_csv(*rep.solution, cfg.out_dir / sol);
    e["field"] = field;
    e["solution"] = sol;
  }
  return e;
}

RunConfig config_from_manifest(const json &man) {
  RunConfig cfg;
  for (const auto &[section, body] : man.at("config").items())
    for (const auto &[key, value] : body.items()) {
      const std::string v = value.get<std::string>();
      if (!v.empty())
        apply_override(cfg, section + "." + key, v);
    }
  return cfg;
}

int threads_from_env() {
  const char *v = std::getenv("NLSF_THREADS");
  if (!v)
    return 1;
  const int n = std::atoi(v);
  return n > 0 ? n : 1;
}

} // namespace

int run_solve(const RunConfig &cfg) {
  const NonlinearitySpec spec = spec_of(cfg);
  const GridPtr grid = grid_of(cfg);
  prepare(cfg.out_dir);

  std::vector<SolveReport> reps;
  if (cfg.multistart_k > 0) {
    reps = minimize_deflated(grid, spec, cfg.solver, cfg.multistart_k);
    if (reps.empty())
      throw MaxIters("deflated multi-start found no solution");
  } else {
    reps.push_back(
        minimize(default_seed(grid, spec, cfg.R_bump), spec, cfg.solver));
  }

  json out;
  out["command"] = "solve";
  json sols = json::array();
  for (std::size_t i = 0; i < reps.size(); ++i)
    sols.push_back(solution_entry(reps[i], spec, cfg, i));
  out["solutions"] = sols;
  if (cfg.kind == SectorKind::Radial) {
    try {
      const auto prof = shoot(spec, cfg.dim_N, {}, cfg.shoot);
      const double J = reps.front().state.J;
      out["oracle"] = {{"J_shoot", prof.J},
                       {"u0", prof.u0},
                       {"rel_diff", std::abs(J - prof.J) / prof.J}};
    } catch (const Error &e) {
      out["oracle"] = {{"error", e.what()}};
    }
  }
  write_json(cfg.out_dir / "report.json", out);
  write_json(cfg.out_dir / "manifest.json", manifest(cfg, "solve"));

  for (const auto &r : reps)
    std::cout << std::setprecision(10) << "J = " << r.state.J
              << "  theta = " << r.theta << "  grad_norm = " << r.grad_norm
              << "  iters = " << r.iters << "  (" << r.stop_reason << ")\n";
  return kOk;
}

int run_oracle(const RunConfig &cfg) {
  const NonlinearitySpec spec = spec_of(cfg);
  std::optional<std::pair<double, double>> bracket;
  if (cfg.u0_low || cfg.u0_high) {
    if (!cfg.u0_low || !cfg.u0_high)
      throw ConfigError("oracle.u0_low and oracle.u0_high go together");
    bracket = std::make_pair(*cfg.u0_low, *cfg.u0_high);
  }
  const RadialProfile prof = shoot(spec, cfg.dim_N, bracket, cfg.shoot);
  prepare(cfg.out_dir);
  {
    std::ofstream csv(cfg.out_dir / "profile.csv");
    csv << std::setprecision(17) << "r,u\n";
    for (std::size_t i = 0; i < prof.r.size(); ++i)
      csv << prof.r[i] << "," << prof.u[i] << "\n";
  }
  write_json(cfg.out_dir / "report.json",
             {{"command", "oracle"}, {"profile", to_json(prof)}});
  write_json(cfg.out_dir / "manifest.json", manifest(cfg, "oracle"));
  std::cout << std::setprecision(10) << "u0 = " << prof.u0
            << "  J = " << prof.J << "  theta = " << prof.theta << "\n";
  return kOk;
}

int run_decompose(const RunConfig &cfg) {
  const SyntheticSequence seq = decomposition_sequence(cfg);
  const ProfileSet ps = extract(seq, cfg.ladder, cfg.r_window, cfg.mass_floor);
  const double p = cfg.psi_exponent;
  const ScalarMap Psi = [p](double s) { return std::pow(std::abs(s), p); };
  const auto rows = splitting_ledger(ps, Psi, seq);
  const auto errors = recovery_errors(ps, seq);
  const NonlinearitySpec spec = spec_of(cfg);
  const ThetaLedger theta = theta_ledger(ps, seq, spec);
  const double pv = lions_exponent(cfg.vanishing_N);
  const VanishingTrace vt = vanishing_test(
      vanishing_sequence(cfg), cfg.vanishing_ladder,
      [pv](double s) { return std::pow(std::abs(s), pv); }, cfg.vanishing_r);

  prepare(cfg.out_dir);
  std::vector<LedgerRow> dir_rows, psi_rows;
  for (const auto &r : rows)
    (r.quantity == "dirichlet" ? dir_rows : psi_rows).push_back(r);
  write_ledger_csv(cfg.out_dir / "ledger_dirichlet.csv", dir_rows);
  write_ledger_csv(cfg.out_dir / "ledger_psi.csv", psi_rows);
  {
    std::ofstream csv(cfg.out_dir / "vanishing.csv");
    csv << std::setprecision(17) << "n,sup_mass,psi_integral\n";
    for (std::size_t k = 0; k < vt.ladder.size(); ++k)
      csv << vt.ladder[k] << "," << vt.sup_mass[k] << ","
          << vt.psi_integral[k] << "\n";
  }
  json out;
  out["command"] = "decompose";
  out["profiles"] = to_json(ps);
  out["recovery_errors"] = errors;
  out["splitting"] = to_json(rows);
  out["remainder_psi"] = ps.axis.integral(ps.remainder.back(), Psi);
  out["theta"] = to_json(theta);
  out["vanishing"] = to_json(vt);
  write_json(cfg.out_dir / "report.json", out);
  write_json(cfg.out_dir / "manifest.json", manifest(cfg, "decompose"));
  std::cout << "recovered " << ps.recovered() << " profiles; vanishing "
            << (vt.vanishing ? "yes" : "no") << "\n";
  return kOk;
}

int run_verify(const fs::path &report) {
  const json rep = read_json(report);
  if (rep.value("command", "") != "solve")
    throw ConfigError(report.string() + " is not a solve report");
  const fs::path dir = report.parent_path();
  const RunConfig cfg = config_from_manifest(read_json(dir / "manifest.json"));
  const NonlinearitySpec spec = spec_of(cfg);
  json out = json::array();
  bool ok = true;
  for (const auto &sol : rep.at("solutions")) {
    if (!sol.contains("field"))
      throw ConfigError("report has no stored field to verify");
    const Field u = read_csv(dir / sol.at("field").get<std::string>());
    const VerificationLedger led = verify_solution(summarize(u, spec), spec);
    ok = ok && led.all_passed();
    out.push_back(to_json(led));
  }
  write_json(dir / "verify.json", out);
  std::cout << out.dump(2) << "\n";
  return ok ? kOk : kSolverFailure;
}

int run_sweep(const RunConfig &cfg, const std::string &param,
              const std::vector<std::string> &values) {
  if (values.empty())
    throw ConfigError("sweep needs at least one value");
  std::vector<RunConfig> runs;
  for (const auto &v : values) {
    RunConfig c = cfg;
    apply_override(c, param, v);
    c.out_dir = cfg.out_dir / (param + "=" + v);
    runs.push_back(std::move(c));
  }
  const int threads = threads_from_env();
  for (std::size_t start = 0; start < runs.size();
       start += static_cast<std::size_t>(threads)) {
    std::vector<std::future<int>> jobs;
    for (std::size_t i = start;
         i < std::min(runs.size(), start + static_cast<std::size_t>(threads));
         ++i)
      jobs.push_back(std::async(std::launch::async,
                                [&runs, i] { return run_solve(runs[i]); }));
    for (auto &j : jobs)
      j.get();
  }

  prepare(cfg.out_dir);
  std::ofstream csv(cfg.out_dir / "convergence.csv");
  csv << std::setprecision(17)
      << param << ",J,theta,grad_norm,residual_pde,pohozaev_residual,"
      << "rel_change_J\n";
  double prev = std::nan("");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const json rep = read_json(runs[i].out_dir / "report.json");
    const json &r = rep.at("solutions").at(0).at("report");
    const double J = r.at("state").at("J").get<double>();
    csv << values[i] << "," << J << "," << r.at("theta") << ","
        << r.at("grad_norm") << "," << r.at("residual_pde") << ","
        << r.at("pohozaev_residual") << ",";
    if (std::isfinite(prev))
      csv << std::abs(J - prev) / std::abs(prev);
    csv << "\n";
    prev = J;
  }
  write_json(cfg.out_dir / "manifest.json", manifest(cfg, "sweep " + param));
  return kOk;
}

int run(int argc, char **argv) {
  CLI::App app{"Ground states and nonradial solutions of -Laplace u = g(u)"};
  app.require_subcommand(1);
  std::string config_path, out_dir, report_path, param;

  auto add_config = [&](CLI::App *sub) {
    sub->add_option("--config", config_path, "INI config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output])");
  };
  auto *solve = app.add_subcommand("solve", "minimize over the Pohozaev set");
  add_config(solve);
  auto *decompose =
      app.add_subcommand("decompose", "profile decomposition diagnostics");
  add_config(decompose);
  auto *oracle = app.add_subcommand("oracle", "radial shooting oracle");
  add_config(oracle);
  auto *verify = app.add_subcommand("verify", "re-check a solve report");
  verify->add_option("--report", report_path, "report.json")->required();
  auto *sweep = app.add_subcommand("sweep", "solve over a parameter list");
  add_config(sweep);
  sweep->add_option("--param", param, "key=v1,v2,...")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (verify->parsed())
      return run_verify(report_path);
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty())
      cfg.out_dir = out_dir;
    if (solve->parsed())
      return run_solve(cfg);
    if (decompose->parsed())
      return run_decompose(cfg);
    if (oracle->parsed())
      return run_oracle(cfg);
    const auto eq = param.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--param expects key=v1,v2,...");
    std::vector<std::string> values;
    std::stringstream in(param.substr(eq + 1));
    for (std::string v; std::getline(in, v, ',');)
      if (!v.empty())
        values.push_back(v);
    return run_sweep(cfg, param.substr(0, eq), values);
  } catch (const ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception &e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

} // namespace nlsf::cli
