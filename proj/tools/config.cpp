#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <nlsf/errors.hpp>

namespace nlsf::cli {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!trim(item).empty())
      out.push_back(trim(item));
  return out;
}

double to_double(const std::string &key, const std::string &text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != t.size())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

long to_long(const std::string &key, const std::string &text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e15)
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return static_cast<long>(v);
}

bool to_bool(const std::string &key, const std::string &text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on")
    return true;
  if (t == "0" || t == "false" || t == "no" || t == "off")
    return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

std::vector<int> to_ladder(const std::string &key, const std::string &text) {
  std::vector<int> out;
  for (const auto &item : split(text, ','))
    out.push_back(static_cast<int>(to_long(key, item)));
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string fmt_ladder(const std::vector<int> &l) {
  std::string s;
  for (std::size_t i = 0; i < l.size(); ++i)
    s += (i ? "," : "") + std::to_string(l[i]);
  return s;
}

std::string fmt_opt(const std::optional<double> &v) {
  return v ? fmt(*v) : "";
}

std::vector<BumpConfig> to_bumps(const std::string &key,
                                 const std::string &text) {
  std::vector<BumpConfig> out;
  for (const auto &item : split(text, ';')) {
    std::istringstream in(item);
    std::vector<std::string> w;
    for (std::string t; in >> t;)
      w.push_back(t);
    if (w.size() != 4)
      throw ConfigError(key + ": each bump is 'shape amplitude width rate'");
    BumpConfig b{w[0], to_double(key, w[1]), to_double(key, w[2]),
                 to_double(key, w[3])};
    if (!(b.width > 0))
      throw ConfigError(key + ": bump width must be positive");
    out.push_back(b);
  }
  return out;
}

std::string fmt_bumps(const std::vector<BumpConfig> &bs) {
  std::string s;
  for (std::size_t i = 0; i < bs.size(); ++i)
    s += (i ? "; " : "") + bs[i].shape + " " + fmt(bs[i].amplitude) + " " +
         fmt(bs[i].width) + " " + fmt(bs[i].rate);
  return s;
}

ScalarMap shape(const std::string &name) {
  if (name == "sech")
    return [](double x) { return 1 / std::cosh(x); };
  if (name == "gauss")
    return [](double x) { return std::exp(-x * x); };
  throw ConfigError("unknown profile shape '" + name + "' (sech, gauss)");
}

struct Key {
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

#define NLSF_NUM(field)                                                        \
  Key {                                                                        \
    [](RunConfig &c, const std::string &v) {                                   \
      c.field = to_double(#field, v);                                          \
    },                                                                         \
        [](const RunConfig &c) { return fmt(c.field); }                        \
  }

const std::map<std::string, Key> &keys() {
  static const std::map<std::string, Key> table = {
      {"sector.kind",
       {[](RunConfig &c, const std::string &v) {
          c.kind = parse_sector_kind(trim(v));
        },
        [](const RunConfig &c) { return to_string(c.kind); }}},
      {"sector.N",
       {[](RunConfig &c, const std::string &v) {
          c.dim_N = static_cast<int>(to_long("sector.N", v));
        },
        [](const RunConfig &c) { return std::to_string(c.dim_N); }}},
      {"sector.m",
       {[](RunConfig &c, const std::string &v) {
          c.m_split = static_cast<int>(to_long("sector.m", v));
        },
        [](const RunConfig &c) { return std::to_string(c.m_split); }}},
      {"sector.tau",
       {[](RunConfig &c, const std::string &v) {
          c.tau = to_bool("sector.tau", v);
        },
        [](const RunConfig &c) { return std::string(c.tau ? "true" : "false"); }}},
      {"nonlinearity.family",
       {[](RunConfig &c, const std::string &v) { c.family = trim(v); },
        [](const RunConfig &c) { return c.family; }}},
      {"nonlinearity.m", NLSF_NUM(m)},
      {"nonlinearity.p", NLSF_NUM(p)},
      {"nonlinearity.a", NLSF_NUM(a)},
      {"nonlinearity.b", NLSF_NUM(b)},
      {"nonlinearity.xi0", NLSF_NUM(xi0)},
      {"nonlinearity.table",
       {[](RunConfig &c, const std::string &v) { c.table = trim(v); },
        [](const RunConfig &c) { return c.table; }}},
      {"grid.R_box", NLSF_NUM(R_box)},
      {"grid.nodes",
       {[](RunConfig &c, const std::string &v) {
          const long n = to_long("grid.nodes", v);
          if (n < 8)
            throw ConfigError("grid.nodes must be at least 8");
          c.nodes = static_cast<std::size_t>(n);
        },
        [](const RunConfig &c) { return std::to_string(c.nodes); }}},
      {"solver.tol_grad", NLSF_NUM(solver.tol_grad)},
      {"solver.max_iters",
       {[](RunConfig &c, const std::string &v) {
          c.solver.max_iters = static_cast<int>(to_long("solver.max_iters", v));
        },
        [](const RunConfig &c) { return std::to_string(c.solver.max_iters); }}},
      {"solver.c1", NLSF_NUM(solver.armijo.c1)},
      {"solver.backtrack", NLSF_NUM(solver.armijo.backtrack)},
      {"solver.step0", NLSF_NUM(solver.armijo.step0)},
      {"solver.deflation_strength", NLSF_NUM(solver.deflation_strength)},
      {"solver.theta_tol", NLSF_NUM(solver.theta_tol)},
      {"solver.reslice_ratio", NLSF_NUM(solver.reslice_ratio)},
      {"solver.newton_iters",
       {[](RunConfig &c, const std::string &v) {
          c.solver.newton_iters =
              static_cast<int>(to_long("solver.newton_iters", v));
        },
        [](const RunConfig &c) {
          return std::to_string(c.solver.newton_iters);
        }}},
      {"solver.max_seeds",
       {[](RunConfig &c, const std::string &v) {
          c.solver.max_seeds = static_cast<int>(to_long("solver.max_seeds", v));
        },
        [](const RunConfig &c) { return std::to_string(c.solver.max_seeds); }}},
      {"solver.multistart_k",
       {[](RunConfig &c, const std::string &v) {
          c.multistart_k = static_cast<int>(to_long("solver.multistart_k", v));
        },
        [](const RunConfig &c) { return std::to_string(c.multistart_k); }}},
      {"solver.R_bump", NLSF_NUM(R_bump)},
      {"output.dir",
       {[](RunConfig &c, const std::string &v) { c.out_dir = trim(v); },
        [](const RunConfig &c) { return c.out_dir.string(); }}},
      {"output.write_field",
       {[](RunConfig &c, const std::string &v) {
          c.write_field = to_bool("output.write_field", v);
        },
        [](const RunConfig &c) {
          return std::string(c.write_field ? "true" : "false");
        }}},
      {"oracle.r_max", NLSF_NUM(shoot.r_max)},
      {"oracle.rel_tol", NLSF_NUM(shoot.rel_tol)},
      {"oracle.abs_tol", NLSF_NUM(shoot.abs_tol)},
      {"oracle.sample_dr", NLSF_NUM(shoot.sample_dr)},
      {"oracle.u0_low",
       {[](RunConfig &c, const std::string &v) {
          c.u0_low = to_double("oracle.u0_low", v);
        },
        [](const RunConfig &c) { return fmt_opt(c.u0_low); }}},
      {"oracle.u0_high",
       {[](RunConfig &c, const std::string &v) {
          c.u0_high = to_double("oracle.u0_high", v);
        },
        [](const RunConfig &c) { return fmt_opt(c.u0_high); }}},
      {"decompose.L", NLSF_NUM(axis_L)},
      {"decompose.h", NLSF_NUM(axis_h)},
      {"decompose.ladder",
       {[](RunConfig &c, const std::string &v) {
          c.ladder = to_ladder("decompose.ladder", v);
        },
        [](const RunConfig &c) { return fmt_ladder(c.ladder); }}},
      {"decompose.r_window", NLSF_NUM(r_window)},
      {"decompose.mass_floor",
       {[](RunConfig &c, const std::string &v) {
          c.mass_floor = to_double("decompose.mass_floor", v);
        },
        [](const RunConfig &c) { return fmt_opt(c.mass_floor); }}},
      {"decompose.bumps",
       {[](RunConfig &c, const std::string &v) {
          c.bumps = to_bumps("decompose.bumps", v);
        },
        [](const RunConfig &c) { return fmt_bumps(c.bumps); }}},
      {"decompose.tail_shape",
       {[](RunConfig &c, const std::string &v) { c.tail_shape = trim(v); },
        [](const RunConfig &c) { return c.tail_shape; }}},
      {"decompose.tail_amplitude", NLSF_NUM(tail_amplitude)},
      {"decompose.psi_exponent", NLSF_NUM(psi_exponent)},
      {"decompose.vanishing_N",
       {[](RunConfig &c, const std::string &v) {
          c.vanishing_N = static_cast<int>(to_long("decompose.vanishing_N", v));
        },
        [](const RunConfig &c) { return std::to_string(c.vanishing_N); }}},
      {"decompose.vanishing_L", NLSF_NUM(vanishing_L)},
      {"decompose.vanishing_h", NLSF_NUM(vanishing_h)},
      {"decompose.vanishing_ladder",
       {[](RunConfig &c, const std::string &v) {
          c.vanishing_ladder = to_ladder("decompose.vanishing_ladder", v);
        },
        [](const RunConfig &c) { return fmt_ladder(c.vanishing_ladder); }}},
      {"decompose.vanishing_r", NLSF_NUM(vanishing_r)},
      {"decompose.vanishing_amplitude", NLSF_NUM(vanishing_amplitude)},
  };
  return table;
}

#undef NLSF_NUM

} // namespace

RunConfig parse_config(const std::string &text,
                       const std::filesystem::path &source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError("malformed config: " + std::string(e.what()));
  }
  RunConfig cfg;
  cfg.source = source;
  for (const auto &[section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside a section");
    for (const auto &[key, value] : body)
      apply_override(cfg, section + "." + key, value.data());
  }
  if (!cfg.table.empty() && std::filesystem::path(cfg.table).is_relative() &&
      !source.empty())
    cfg.table = (source.parent_path() / cfg.table).string();
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void apply_override(RunConfig &cfg, const std::string &key,
                    const std::string &value) {
  std::string full = key;
  if (full.find('.') == std::string::npos)
    for (const char *sec : {"grid.", "solver."})
      if (keys().count(sec + key)) {
        full = sec + key;
        break;
      }
  const auto it = keys().find(full);
  if (it == keys().end())
    throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, value);
}

std::map<std::string, std::map<std::string, std::string>>
echo(const RunConfig &cfg) {
  std::map<std::string, std::map<std::string, std::string>> out;
  for (const auto &[name, key] : keys()) {
    const auto dot = name.find('.');
    out[name.substr(0, dot)][name.substr(dot + 1)] = key.get(cfg);
  }
  return out;
}

SymmetrySector sector_of(const RunConfig &cfg) {
  SymmetrySector s{cfg.kind, cfg.dim_N, cfg.m_split, cfg.tau};
  s.validate();
  return s;
}

NonlinearitySpec spec_of(const RunConfig &cfg) {
  if (cfg.family == "power")
    return truncate(NonlinearitySpec::power(cfg.m, cfg.p, cfg.xi0, cfg.dim_N));
  if (cfg.family == "cubic_quintic")
    return truncate(NonlinearitySpec::cubic_quintic(cfg.m, cfg.a, cfg.b,
                                                    cfg.xi0, cfg.dim_N));
  if (cfg.family == "tabulated") {
    if (cfg.table.empty())
      throw ConfigError("nonlinearity.table is required for 'tabulated'");
    return truncate(
        NonlinearitySpec::from_csv(cfg.table, cfg.m, cfg.xi0, cfg.dim_N));
  }
  throw ConfigError("unknown nonlinearity family '" + cfg.family +
                    "' (power, cubic_quintic, tabulated)");
}

GridPtr grid_of(const RunConfig &cfg) {
  return build_grid(sector_of(cfg), cfg.R_box, cfg.nodes);
}

SyntheticSequence decomposition_sequence(const RunConfig &cfg) {
  if (cfg.bumps.empty())
    throw ConfigError("decompose.bumps is empty");
  SyntheticSequence seq;
  seq.axis = AxisLine::line(cfg.axis_L, cfg.axis_h);
  for (const auto &b : cfg.bumps) {
    const ScalarMap f = shape(b.shape);
    seq.profiles.push_back(
        [f, b](double x) { return b.amplitude * f(x / b.width); });
    seq.centers.push_back([r = b.rate](int n) { return r * n; });
  }
  seq.tail = shape(cfg.tail_shape);
  seq.tail_amplitude = cfg.tail_amplitude;
  return seq;
}

SyntheticSequence vanishing_sequence(const RunConfig &cfg) {
  SyntheticSequence seq;
  seq.axis = AxisLine::radial(cfg.vanishing_N, cfg.vanishing_L, cfg.vanishing_h);
  seq.tail = shape(cfg.tail_shape);
  seq.tail_amplitude = cfg.vanishing_amplitude;
  return seq;
}

} // namespace nlsf::cli
