#include "report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/sha.h>

#include <nlsf/errors.hpp>

namespace nlsf::cli {

namespace {

// JSON has no NaN or infinity; those become null.
json num(double v) {
  if (!std::isfinite(v))
    return nullptr;
  return v;
}

json nums(const std::vector<double> &v) {
  json a = json::array();
  for (double x : v)
    a.push_back(num(x));
  return a;
}

} // namespace

json to_json(const VariationalState &s) {
  return {{"J", num(s.J)},         {"M", num(s.M)},
          {"psi", num(s.psi)},     {"intG", num(s.intG)},
          {"intG1", num(s.intG1)}, {"intG2", num(s.intG2)},
          {"r_of_u", s.r_of_u ? num(*s.r_of_u) : json(nullptr)}};
}

json to_json(const SolveReport &r) {
  json j;
  j["sector"] = {{"kind", to_string(r.sector.kind)},
                 {"N", r.sector.dim_N},
                 {"m", r.sector.m_split},
                 {"tau", r.sector.tau_antisym}};
  j["state"] = to_json(r.state);
  j["theta"] = num(r.theta);
  j["grad_norm"] = num(r.grad_norm);
  j["iters"] = r.iters;
  j["residual_pde"] = num(r.residual_pde);
  j["pohozaev_residual"] = num(r.pohozaev_residual);
  j["stop_reason"] = r.stop_reason;
  j["J_history"] = nums(r.J_history);
  return j;
}

json to_json(const VerificationLedger &l) {
  json checks = json::array();
  for (const auto &c : l.checks)
    checks.push_back({{"name", c.name},
                      {"value", num(c.value)},
                      {"threshold", num(c.threshold)},
                      {"passed", c.passed}});
  return {{"J", num(l.J)},
          {"J_omega1", num(l.J_omega1)},
          {"all_passed", l.all_passed()},
          {"checks", checks}};
}

json to_json(const RadialProfile &p) {
  return {{"N", p.dim_N},
          {"u0", num(p.u0)},
          {"psi", num(p.psi)},
          {"intG", num(p.intG)},
          {"int_gu", num(p.int_gu)},
          {"J", num(p.J)},
          {"pohozaev_residual", num(p.pohozaev_residual)},
          {"theta", num(p.theta)},
          {"bisections", p.bisections},
          {"r_end", p.r.empty() ? json(nullptr) : num(p.r.back())}};
}

json to_json(const ProfileSet &ps) {
  json profiles = json::array();
  for (std::size_t i = 0; i < ps.profiles.size(); ++i)
    profiles.push_back({{"i", i},
                        {"mass", num(ps.axis.mass(ps.profiles[i]))},
                        {"dirichlet", num(ps.axis.dirichlet(ps.profiles[i]))},
                        {"centers", nums(ps.centers[i])},
                        {"sup_mass_after", nums(ps.sup_mass[i])}});
  return {{"ladder", ps.ladder},
          {"r_window", num(ps.r_window)},
          {"mass_floor", num(ps.mass_floor)},
          {"recovered", ps.recovered()},
          {"profiles", profiles}};
}

json to_json(const std::vector<LedgerRow> &rows) {
  json a = json::array();
  for (const auto &r : rows)
    a.push_back({{"quantity", r.quantity},
                 {"i", r.i},
                 {"n", r.n},
                 {"LHS", num(r.lhs)},
                 {"sum", num(r.sum)},
                 {"remainder", num(r.remainder)},
                 {"defect", num(r.defect)}});
  return a;
}

json to_json(const VanishingTrace &t) {
  return {{"ladder", t.ladder},
          {"sup_mass", nums(t.sup_mass)},
          {"psi_integral", nums(t.psi_integral)},
          {"vanishing", t.vanishing}};
}

json to_json(const ThetaLedger &t) {
  return {{"theta", nums(t.theta)},
          {"max_theta", num(t.max_theta)},
          {"some_theta_ge_one", t.some_theta_ge_one},
          {"G1_defect", num(t.G1_defect)},
          {"G2_excess", num(t.G2_excess)},
          {"psi_excess", num(t.psi_excess)}};
}

std::string git_blob_sha1(const std::string &bytes) {
  const std::string data =
      "blob " + std::to_string(bytes.size()) + std::string(1, '\0') + bytes;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char *>(data.data()), data.size(),
       digest);
  std::ostringstream hex;
  for (unsigned char c : digest)
    hex << std::hex << std::setw(2) << std::setfill('0') << int(c);
  return hex.str();
}

std::string git_blob_sha1(const std::filesystem::path &file) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return git_blob_sha1(buf.str());
}

json manifest(const RunConfig &cfg, const std::string &command) {
  json config;
  for (const auto &[section, body] : echo(cfg)) {
    json s;
    for (const auto &[k, v] : body)
      s[k] = v;
    config[section] = s;
  }
  json inputs = json::array();
  if (!cfg.source.empty())
    inputs.push_back({{"role", "config"},
                      {"path", cfg.source.string()},
                      {"git_blob_sha1", git_blob_sha1(cfg.source)}});
  if (cfg.family == "tabulated" && !cfg.table.empty())
    inputs.push_back({{"role", "nonlinearity.table"},
                      {"path", cfg.table},
                      {"git_blob_sha1",
                       git_blob_sha1(std::filesystem::path(cfg.table))}});
  return {{"command", command}, {"config", config}, {"inputs", inputs}};
}

void write_json(const std::filesystem::path &path, const json &j) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json read_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_ledger_csv(const std::filesystem::path &path,
                      const std::vector<LedgerRow> &rows) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17) << "quantity,i,n,LHS,sum,remainder,defect\n";
  for (const auto &r : rows)
    out << r.quantity << "," << r.i << "," << r.n << "," << r.lhs << ","
        << r.sum << "," << r.remainder << "," << r.defect << "\n";
}

} // namespace nlsf::cli
