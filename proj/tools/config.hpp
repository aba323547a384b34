#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlsf/grid.hpp>
#include <nlsf/nonlinearity.hpp>
#include <nlsf/oracle.hpp>
#include <nlsf/profiles.hpp>
#include <nlsf/solver.hpp>

namespace nlsf::cli {

/// Synthetic profile "shape amplitude width rate": shape(x / width) scaled by
/// amplitude, centered at rate * n.
struct BumpConfig {
  std::string shape = "sech";
  double amplitude = 1;
  double width = 1;
  double rate = 0;
};

/// Resolved run configuration, defaults filled in. Sections: sector,
/// nonlinearity, grid, solver, output, oracle, decompose.
struct RunConfig {
  // [sector]
  SectorKind kind = SectorKind::Radial;
  int dim_N = 3;
  int m_split = 0;
  bool tau = false;
  // [nonlinearity]
  std::string family = "power";
  double m = 1;
  double p = 4;
  double a = 0;
  double b = 0;
  double xi0 = 2;
  std::string table;
  // [grid]
  double R_box = 20;
  std::size_t nodes = 512;
  // [solver]
  SolveConfig solver;
  int multistart_k = 0;
  double R_bump = 1;
  // [output]
  std::filesystem::path out_dir = "out";
  bool write_field = true;
  // [oracle]
  ShootOptions shoot;
  std::optional<double> u0_low;
  std::optional<double> u0_high;
  // [decompose]
  double axis_L = 200;
  double axis_h = 0.0625;
  std::vector<int> ladder{8, 16, 24, 32, 40, 48, 56, 64};
  double r_window = 6;
  std::optional<double> mass_floor;
  std::vector<BumpConfig> bumps;
  std::string tail_shape = "gauss";
  double tail_amplitude = 0;
  double psi_exponent = 3; // splitting ledger Psi = |s|^p
  int vanishing_N = 3;
  double vanishing_L = 400;
  double vanishing_h = 0.05;
  std::vector<int> vanishing_ladder{1, 2, 4, 8, 16, 32, 64};
  double vanishing_r = 1;
  double vanishing_amplitude = 1;

  std::filesystem::path source; // config file, empty when built in memory
};

/// Parses an INI file. Unknown keys and malformed values raise ConfigError.
RunConfig load_config(const std::filesystem::path &path);
RunConfig parse_config(const std::string &text,
                       const std::filesystem::path &source = {});

/// Applies "section.key=value" (or a bare grid/solver key).
void apply_override(RunConfig &cfg, const std::string &key,
                    const std::string &value);

/// Every resolved parameter as section -> key -> text.
std::map<std::string, std::map<std::string, std::string>>
echo(const RunConfig &cfg);

SymmetrySector sector_of(const RunConfig &cfg);
/// Builds, validates and truncates the nonlinearity.
NonlinearitySpec spec_of(const RunConfig &cfg);
GridPtr grid_of(const RunConfig &cfg);
SyntheticSequence decomposition_sequence(const RunConfig &cfg);
SyntheticSequence vanishing_sequence(const RunConfig &cfg);

} // namespace nlsf::cli
