#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <nlsf/errors.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "report.hpp"

using namespace nlsf;
using namespace nlsf::cli;
namespace fs = std::filesystem;

namespace {

const char *kRadial = R"(
[sector]
kind = Radial
N = 3
[nonlinearity]
family = power
m = 1
p = 4
xi0 = 2
[grid]
R_box = 20
nodes = 512
)";

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("nlsf_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_binary(const std::string &args) {
  const std::string cmd = std::string(NLSF_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, ParsesAndEchoes) {
  const auto cfg = parse_config(kRadial);
  EXPECT_EQ(cfg.kind, SectorKind::Radial);
  EXPECT_EQ(cfg.nodes, 512u);
  EXPECT_EQ(cfg.R_box, 20);
  const auto e = echo(cfg);
  EXPECT_EQ(e.at("grid").at("nodes"), "512");
  EXPECT_TRUE(e.count("solver"));
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(parse_config("[grid]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[grid]\nnodes = many\n"), ConfigError);
  auto cfg = parse_config(kRadial);
  apply_override(cfg, "nodes", "256");
  EXPECT_EQ(cfg.nodes, 256u);
  EXPECT_THROW(apply_override(cfg, "nope", "1"), ConfigError);
}

TEST(Config, NonlinearityHypothesisNamed) {
  auto cfg = parse_config(kRadial);
  cfg.m = -1;
  try {
    spec_of(cfg);
    FAIL() << "m <= 0 accepted";
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("(g1)"), std::string::npos);
  }
}

TEST(Report, GitBlobHash) {
  EXPECT_EQ(git_blob_sha1(std::string("hello\n")),
            "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(git_blob_sha1(std::string()),
            "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Report, NonFiniteBecomesNull) {
  ThetaLedger t;
  t.theta = {1.0, std::nan("")};
  const auto j = to_json(t);
  EXPECT_TRUE(j.at("theta").at(1).is_null());
}

TEST(Commands, SolveIsDeterministic) {
  auto cfg = parse_config(kRadial);
  const auto a = scratch("det_a"), b = scratch("det_b");
  cfg.out_dir = a;
  ASSERT_EQ(run_solve(cfg), kOk);
  cfg.out_dir = b;
  ASSERT_EQ(run_solve(cfg), kOk);
  const std::string ra = slurp(a / "report.json");
  ASSERT_FALSE(ra.empty());
  EXPECT_EQ(ra, slurp(b / "report.json"));
  const auto rep = read_json(a / "report.json");
  EXPECT_TRUE(rep.at("solutions").at(0).at("ledger").at("all_passed"));
  EXPECT_TRUE(fs::exists(a / "manifest.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Commands, SweepWritesConvergenceTable) {
  auto cfg = parse_config(kRadial);
  cfg.out_dir = scratch("sweep");
  ASSERT_EQ(run_sweep(cfg, "nodes", {"256", "512"}), kOk);
  const std::string csv = slurp(cfg.out_dir / "convergence.csv");
  std::istringstream in(csv);
  int lines = 0;
  for (std::string l; std::getline(in, l);)
    ++lines;
  EXPECT_EQ(lines, 3);
  EXPECT_TRUE(fs::exists(cfg.out_dir / "nodes=256" / "report.json"));
  fs::remove_all(cfg.out_dir);
}

TEST(Binary, ExitCodes) {
  const fs::path dir = scratch("bin");
  fs::create_directories(dir);
  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << "[nonlinearity]\nm = -1\n";
  EXPECT_EQ(run_binary("solve --config " + bad.string()), kConfigError);
  const fs::path unknown = dir / "unknown.ini";
  std::ofstream(unknown) << "[grid]\nwhat = 1\n";
  EXPECT_EQ(run_binary("solve --config " + unknown.string()), kConfigError);
  EXPECT_EQ(run_binary("solve"), kConfigError);
  EXPECT_EQ(run_binary("solve --config " + (dir / "missing.ini").string()),
            kConfigError);

  const fs::path out = dir / "radial";
  EXPECT_EQ(run_binary(std::string("solve --config ") + NLSF_CONFIG_DIR +
                "/radial_n3.ini --out " + out.string()),
            kOk);
  EXPECT_EQ(run_binary("verify --report " + (out / "report.json").string()), kOk);
  EXPECT_TRUE(fs::exists(out / "verify.json"));

  EXPECT_EQ(run_binary(std::string("oracle --config ") + NLSF_CONFIG_DIR +
                "/radial_n3.ini --out " + (dir / "oracle").string()),
            kOk);
  EXPECT_TRUE(fs::exists(dir / "oracle" / "profile.csv"));
  fs::remove_all(dir);
}

TEST(Binary, Decompose) {
  const fs::path out = scratch("decompose");
  EXPECT_EQ(run_binary(std::string("decompose --config ") + NLSF_CONFIG_DIR +
                "/decompose.ini --out " + out.string()),
            kOk);
  for (const char *f : {"report.json", "ledger_dirichlet.csv", "ledger_psi.csv",
                        "vanishing.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  fs::remove_all(out);
}
