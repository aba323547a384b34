#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace nlsf::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kSolverFailure = 3;

/// Each writes report.json, manifest.json and CSV artifacts under out_dir
/// and returns an exit code. Library errors propagate.
int run_solve(const RunConfig &cfg);
int run_oracle(const RunConfig &cfg);
int run_decompose(const RunConfig &cfg);
/// Re-evaluates the residual suite for the field stored next to a solve
/// report; exit 3 when a check fails.
int run_verify(const std::filesystem::path &report);
/// One solve per value of `param`, each under out_dir/<param>=<value>, and
/// out_dir/convergence.csv.
int run_sweep(const RunConfig &cfg, const std::string &param,
              const std::vector<std::string> &values);

/// Command line entry point; maps errors to exit codes.
int run(int argc, char **argv);

} // namespace nlsf::cli
