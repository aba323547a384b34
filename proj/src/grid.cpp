#include "nlsf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "nlsf/errors.hpp"
#include "nlsf/interp.hpp"

namespace nlsf {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double sphere_area(int k) {
  // |S^{k-1}| = 2 pi^{k/2} / Gamma(k/2)
  return 2 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

Axis make_radial_axis(std::string name, int k, double R, std::size_t n) {
  Axis a;
  a.name = std::move(name);
  a.k = k;
  a.h = R / static_cast<double>(n - 1);
  a.nodes.resize(n);
  a.weights.resize(n);
  a.edges.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    a.nodes[i] = a.h * static_cast<double>(i);
  a.nodes.back() = R;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::max(0.0, a.nodes[i] - a.h / 2);
    const double hi = std::min(R, a.nodes[i] + a.h / 2);
    a.weights[i] = (std::pow(hi, k) - std::pow(lo, k)) / k;
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    a.edges[i] = std::pow(a.nodes[i] + a.h / 2, k - 1) / a.h;
  a.first = 0;
  a.last = n - 1;
  return a;
}

Axis make_line_axis(std::string name, double R, std::size_t n) {
  Axis a;
  a.name = std::move(name);
  a.k = 1;
  a.line = true;
  a.h = 2 * R / static_cast<double>(n - 1);
  a.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    a.nodes[i] = -R + a.h * static_cast<double>(i);
  a.nodes.back() = R;
  a.weights.assign(n, a.h);
  a.weights.front() = a.weights.back() = a.h / 2;
  a.edges.assign(n - 1, 1.0 / a.h);
  a.first = 1;
  a.last = n - 1;
  return a;
}

// Applies M (free x free) along one axis of a compact free-node tensor.
Eigen::VectorXd mode_product(const Eigen::VectorXd &x,
                             const std::vector<std::size_t> &shape,
                             std::size_t axis, const Eigen::MatrixXd &M) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a)
    outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a)
    inner *= shape[a];
  const auto n = static_cast<Eigen::Index>(shape[axis]);
  const auto ni = static_cast<Eigen::Index>(inner);
  Eigen::VectorXd y(x.size());
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<const RowMat> in(x.data() + o * shape[axis] * inner, n, ni);
    Eigen::Map<RowMat> out(y.data() + o * shape[axis] * inner, n, ni);
    out.noalias() = M * in;
  }
  return y;
}

} // namespace

std::string to_string(SectorKind kind) {
  switch (kind) {
  case SectorKind::Radial:
    return "Radial";
  case SectorKind::BiradialO1:
    return "BiradialO1";
  case SectorKind::TriradialO2:
    return "TriradialO2";
  }
  return "?";
}

SectorKind parse_sector_kind(const std::string &name) {
  std::string s;
  for (char c : name)
    s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "radial")
    return SectorKind::Radial;
  if (s == "biradialo1" || s == "o1")
    return SectorKind::BiradialO1;
  if (s == "triradialo2" || s == "o2")
    return SectorKind::TriradialO2;
  throw ConfigError("unknown sector kind '" + name + "'");
}

void SymmetrySector::validate() const {
  if (dim_N < 3)
    throw ConfigError("sector dimension N must be >= 3");
  if (kind == SectorKind::Radial) {
    if (tau_antisym)
      throw ConfigError("X_tau contains no nontrivial radial functions; "
                        "tau_antisym is not allowed in the Radial sector");
    return;
  }
  if (m_split < 2 || 2 * m_split > dim_N)
    throw ConfigError("m_split must satisfy 2 <= m <= N/2");
  if (kind == SectorKind::BiradialO1 && 2 * m_split == dim_N)
    throw ConfigError("BiradialO1 requires m < N/2");
  if (kind == SectorKind::TriradialO2 && third_dim() == 1)
    throw ConfigError("TriradialO2 requires N - 2m != 1");
}

ReducedGrid::ReducedGrid(SymmetrySector sector, double box_radius,
                         std::size_t nodes)
    : sector_(sector), box_radius_(box_radius), nodes_(nodes) {
  sector_.validate();
  if (nodes < 16)
    throw ConfigError("nodes_per_axis must be >= 16");
  if (!(box_radius > 0) || !std::isfinite(box_radius))
    throw ConfigError("box radius must be positive");

  const int N = sector_.dim_N, m = sector_.m_split, k3 = sector_.third_dim();
  if (sector_.kind == SectorKind::Radial) {
    axes_.push_back(make_radial_axis("r", N, box_radius, nodes));
  } else {
    axes_.push_back(make_radial_axis("r1", m, box_radius, nodes));
    axes_.push_back(make_radial_axis("r2", m, box_radius, nodes));
    if (k3 == 1)
      axes_.push_back(make_line_axis("z", box_radius, nodes));
    else if (k3 >= 2)
      axes_.push_back(make_radial_axis("r3", k3, box_radius, nodes));
  }

  strides_.assign(axes_.size(), 1);
  for (std::size_t a = axes_.size(); a-- > 0;) {
    strides_[a] = size_;
    size_ *= axes_[a].size();
  }
  for (const auto &ax : axes_)
    if (!ax.line)
      sphere_constant_ *= sphere_area(ax.k);

  weights_.resize(static_cast<Eigen::Index>(size_));
  interior_.resize(static_cast<Eigen::Index>(size_));
  for (std::size_t p = 0; p < size_; ++p) {
    const auto mi = multi_index(p);
    double w = sphere_constant_;
    bool free = true;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      w *= axes_[a].weights[mi[a]];
      free = free && mi[a] >= axes_[a].first && mi[a] < axes_[a].last;
    }
    weights_[static_cast<Eigen::Index>(p)] = w;
    interior_[static_cast<Eigen::Index>(p)] = free ? 1.0 : 0.0;
  }

  if (axes_.size() >= 2 && axes_[0].nodes == axes_[1].nodes) {
    tau_perm_.resize(size_);
    for (std::size_t p = 0; p < size_; ++p) {
      auto mi = multi_index(p);
      std::swap(mi[0], mi[1]);
      tau_perm_[p] = flat_index(std::span(mi.data(), axes_.size()));
    }
  }
}

GridPtr build_grid(const SymmetrySector &sector, double box_radius,
                   std::size_t nodes_per_axis) {
  return std::make_shared<const ReducedGrid>(sector, box_radius,
                                             nodes_per_axis);
}

std::array<std::size_t, 3> ReducedGrid::multi_index(std::size_t flat) const {
  std::array<std::size_t, 3> mi{0, 0, 0};
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    mi[a] = flat / strides_[a];
    flat %= strides_[a];
  }
  return mi;
}

std::size_t ReducedGrid::flat_index(std::span<const std::size_t> idx) const {
  std::size_t p = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a)
    p += idx[a] * strides_[a];
  return p;
}

std::vector<double> ReducedGrid::coordinates(std::size_t flat) const {
  const auto mi = multi_index(flat);
  std::vector<double> x(axes_.size());
  for (std::size_t a = 0; a < axes_.size(); ++a)
    x[a] = axes_[a].nodes[mi[a]];
  return x;
}

double ReducedGrid::radius(std::size_t flat) const {
  const auto mi = multi_index(flat);
  double s = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a)
    s += axes_[a].nodes[mi[a]] * axes_[a].nodes[mi[a]];
  return std::sqrt(s);
}

int ReducedGrid::line_axis() const {
  for (std::size_t a = 0; a < axes_.size(); ++a)
    if (axes_[a].line)
      return static_cast<int>(a);
  return -1;
}

bool ReducedGrid::same_as(const ReducedGrid &o) const {
  return this == &o ||
         (sector_.kind == o.sector_.kind && sector_.dim_N == o.sector_.dim_N &&
          sector_.m_split == o.sector_.m_split &&
          sector_.tau_antisym == o.sector_.tau_antisym &&
          box_radius_ == o.box_radius_ && nodes_ == o.nodes_);
}

// Visits every edge (p, p + stride) along every axis with its coefficient
// C * e_a[i_a] * prod_{b != a} w_b[i_b].
template <class F> static void for_each_edge(const ReducedGrid &g, F &&f) {
  const auto &axes = g.axes();
  const std::size_t d = axes.size();
  std::vector<std::size_t> strides(d, 1);
  for (std::size_t a = d - 1; a-- > 0;)
    strides[a] = strides[a + 1] * axes[a + 1].size();
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto mi = g.multi_index(p);
    for (std::size_t a = 0; a < d; ++a) {
      if (mi[a] + 1 >= axes[a].size())
        continue;
      double c = g.sphere_constant() * axes[a].edges[mi[a]];
      for (std::size_t b = 0; b < d; ++b)
        if (b != a)
          c *= axes[b].weights[mi[b]];
      f(p, p + strides[a], c);
    }
  }
}

Eigen::VectorXd ReducedGrid::stiffness(const Eigen::VectorXd &u) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  for_each_edge(*this, [&](std::size_t p, std::size_t q, double c) {
    const double flux = c * (u[static_cast<Eigen::Index>(q)] -
                             u[static_cast<Eigen::Index>(p)]);
    out[static_cast<Eigen::Index>(p)] -= flux;
    out[static_cast<Eigen::Index>(q)] += flux;
  });
  return out.cwiseProduct(interior_);
}

double ReducedGrid::dirichlet(const Eigen::VectorXd &u,
                              const Eigen::VectorXd &v) const {
  double s = 0;
  for_each_edge(*this, [&](std::size_t p, std::size_t q, double c) {
    const auto ip = static_cast<Eigen::Index>(p);
    const auto iq = static_cast<Eigen::Index>(q);
    s += c * (u[iq] - u[ip]) * (v[iq] - v[ip]);
  });
  return s;
}

const ReducedGrid::Spectral &ReducedGrid::spectral() const {
  std::call_once(spectral_once_, [this] {
    auto sp = std::make_unique<Spectral>();
    for (const auto &ax : axes_) {
      const auto f = static_cast<Eigen::Index>(ax.free_size());
      Eigen::MatrixXd S = Eigen::MatrixXd::Zero(f, f);
      Eigen::VectorXd isw(f);
      for (Eigen::Index j = 0; j < f; ++j) {
        const std::size_t i = ax.first + static_cast<std::size_t>(j);
        isw[j] = 1.0 / std::sqrt(ax.weights[i]);
        double diag = ax.edges[i];
        if (i > 0)
          diag += ax.edges[i - 1];
        S(j, j) = diag;
        if (j + 1 < f)
          S(j, j + 1) = S(j + 1, j) = -ax.edges[i];
      }
      S = isw.asDiagonal() * S * isw.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
      sp->vectors.push_back(isw.asDiagonal() * es.eigenvectors());
      sp->values.push_back(es.eigenvalues());
    }
    spectral_ = std::move(sp);
  });
  return *spectral_;
}

Eigen::VectorXd ReducedGrid::solve_h1(const Eigen::VectorXd &b) const {
  const auto &sp = spectral();
  const std::size_t d = axes_.size();
  std::vector<std::size_t> shape(d);
  std::size_t nfree = 1;
  for (std::size_t a = 0; a < d; ++a) {
    shape[a] = axes_[a].free_size();
    nfree *= shape[a];
  }

  // Gather free entries into a compact tensor.
  std::vector<std::size_t> map;
  map.reserve(nfree);
  for (std::size_t p = 0; p < size_; ++p)
    if (interior_[static_cast<Eigen::Index>(p)] != 0)
      map.push_back(p);
  Eigen::VectorXd x(static_cast<Eigen::Index>(nfree));
  for (std::size_t j = 0; j < nfree; ++j)
    x[static_cast<Eigen::Index>(j)] = b[static_cast<Eigen::Index>(map[j])];

  for (std::size_t a = 0; a < d; ++a)
    x = mode_product(x, shape, a, sp.vectors[a].transpose());
  for (std::size_t j = 0; j < nfree; ++j) {
    std::size_t rem = j;
    double lam = 1.0;
    for (std::size_t a = d; a-- > 0;) {
      lam += sp.values[a][static_cast<Eigen::Index>(rem % shape[a])];
      rem /= shape[a];
    }
    x[static_cast<Eigen::Index>(j)] /= sphere_constant_ * lam;
  }
  for (std::size_t a = 0; a < d; ++a)
    x = mode_product(x, shape, a, sp.vectors[a]);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size_));
  for (std::size_t j = 0; j < nfree; ++j)
    out[static_cast<Eigen::Index>(map[j])] = x[static_cast<Eigen::Index>(j)];
  return out;
}

Field::Field(GridPtr grid)
    : grid_(std::move(grid)),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_->size()))) {}

Field::Field(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(grid_->size()))
    throw GridMismatch("field value count does not match grid size");
  clamp_boundary();
}

void Field::clamp_boundary() {
  values_ = values_.cwiseProduct(grid_->interior());
}

Field &Field::operator+=(const Field &o) {
  require_same_grid(*this, o);
  values_ += o.values_;
  return *this;
}

Field &Field::operator-=(const Field &o) {
  require_same_grid(*this, o);
  values_ -= o.values_;
  return *this;
}

Field &Field::operator*=(double a) {
  values_ *= a;
  return *this;
}

void require_same_grid(const Field &a, const Field &b) {
  if (!a.grid().same_as(b.grid()))
    throw GridMismatch();
}

Field sample(const GridPtr &grid,
             const std::function<double(std::span<const double>)> &f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t p = 0; p < grid->size(); ++p) {
    const auto x = grid->coordinates(p);
    v[static_cast<Eigen::Index>(p)] = f(x);
  }
  return Field(grid, std::move(v));
}

Field sample_radial(const GridPtr &grid,
                    const std::function<double(double)> &f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t p = 0; p < grid->size(); ++p)
    v[static_cast<Eigen::Index>(p)] = f(grid->radius(p));
  return Field(grid, std::move(v));
}

InnerProducts inner_products(const Field &u, const Field &v) {
  require_same_grid(u, v);
  return {u.grid().l2(u.values(), v.values()),
          u.grid().dirichlet(u.values(), v.values())};
}

double psi(const Field &u) {
  return u.grid().dirichlet(u.values(), u.values());
}

double h1_norm(const Field &u) {
  return std::sqrt(u.grid().h1(u.values(), u.values()));
}

Field laplacian(const Field &u) {
  const auto &g = u.grid();
  Eigen::VectorXd Ku = g.stiffness(u.values());
  return Field(u.grid_ptr(), -Ku.cwiseQuotient(g.weights()));
}

namespace {

// Resamples every line along `axis` at positions map(x_i); outside the node
// range the value is 0.
Eigen::VectorXd resample_axis(const ReducedGrid &g, const Eigen::VectorXd &u,
                              std::size_t axis,
                              const std::function<double(double)> &map) {
  const auto &ax = g.axes()[axis];
  const std::size_t n = ax.size();
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < g.dims(); ++a)
    inner *= g.axes()[a].size();
  const std::size_t outer = g.size() / (n * inner);

  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i)
    targets[i] = map(ax.nodes[i]);
  const double lo = ax.nodes.front(), hi = ax.nodes.back();
  const double slope0 =
      ax.line ? std::numeric_limits<double>::quiet_NaN() : 0.0;

  Eigen::VectorXd out(u.size());
  std::vector<double> line(n);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      bool zero = true;
      for (std::size_t i = 0; i < n; ++i) {
        line[i] = u[static_cast<Eigen::Index>(base + i * inner)];
        zero = zero && line[i] == 0.0;
      }
      if (zero) {
        for (std::size_t i = 0; i < n; ++i)
          out[static_cast<Eigen::Index>(base + i * inner)] = 0.0;
        continue;
      }
      MonotoneCubic interp(ax.nodes, line, slope0);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = targets[i];
        out[static_cast<Eigen::Index>(base + i * inner)] =
            (t < lo || t > hi) ? 0.0 : interp(t);
      }
    }
  return out;
}

} // namespace

Field rescale(const Field &u, double r) {
  if (!(r > 0))
    throw std::invalid_argument("rescale factor must be positive");
  if (r == 1.0)
    return u;
  Eigen::VectorXd v = u.values();
  for (std::size_t a = 0; a < u.grid().dims(); ++a)
    v = resample_axis(u.grid(), v, a, [r](double x) { return r * x; });
  return Field(u.grid_ptr(), std::move(v));
}

Field dilate(const Field &u, double r) {
  if (!(r > 0))
    throw std::invalid_argument("dilation factor must be positive");
  if (r == 1.0)
    return u;
  const auto &g = u.grid();
  return Field(build_grid(g.sector(), g.box_radius() / r, g.nodes_per_axis()),
               u.values());
}

Field translate_z(const Field &u, double dz) {
  const int z = u.grid().line_axis();
  if (z < 0)
    throw std::invalid_argument(
        "translate_z needs a sector with an unreduced z axis");
  if (dz == 0.0)
    return u;
  return Field(u.grid_ptr(),
               resample_axis(u.grid(), u.values(), static_cast<std::size_t>(z),
                             [dz](double x) { return x - dz; }));
}

Field ball_indicator(const GridPtr &grid, double rho) {
  const double h = grid->spacing();
  return sample_radial(grid, [&](double r) {
    return std::clamp((rho - r) / h + 0.5, 0.0, 1.0);
  });
}

double ball_volume(const GridPtr &grid, double rho) {
  const double h = grid->spacing();
  double s = 0;
  for (std::size_t p = 0; p < grid->size(); ++p)
    s += grid->weights()[static_cast<Eigen::Index>(p)] *
         std::clamp((rho - grid->radius(p)) / h + 0.5, 0.0, 1.0);
  return s;
}

double exact_ball_volume(int dim_N, double rho) {
  return std::pow(std::numbers::pi, 0.5 * dim_N) /
         std::tgamma(0.5 * dim_N + 1) * std::pow(rho, dim_N);
}

Field radial_average(const Field &u) {
  const auto &g = u.grid();
  const double h = g.spacing();
  std::map<long, std::pair<double, double>> bins;
  std::vector<long> bin_of(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const long b = std::lround(g.radius(p) / h);
    bin_of[p] = b;
    const double w = g.weights()[static_cast<Eigen::Index>(p)];
    auto &acc = bins[b];
    acc.first += w * u.values()[static_cast<Eigen::Index>(p)];
    acc.second += w;
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto &acc = bins[bin_of[p]];
    v[static_cast<Eigen::Index>(p)] =
        acc.second > 0 ? acc.first / acc.second : 0.0;
  }
  return Field(u.grid_ptr(), std::move(v));
}

void write_csv(const Field &u, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  const auto &g = u.grid();
  const auto &s = g.sector();
  out << std::setprecision(17);
  out << "# sector=" << to_string(s.kind) << " N=" << s.dim_N
      << " m=" << s.m_split << " tau=" << (s.tau_antisym ? 1 : 0)
      << " R_box=" << g.box_radius() << " nodes=" << g.nodes_per_axis()
      << "\n";
  for (const auto &ax : g.axes())
    out << ax.name << ",";
  out << "u\n";
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (double x : g.coordinates(p))
      out << x << ",";
    out << u.values()[static_cast<Eigen::Index>(p)] << "\n";
  }
}

Field read_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("# ", 0) != 0)
    throw ConfigError("field CSV lacks the grid header line");
  std::map<std::string, std::string> kv;
  std::istringstream hs(line.substr(2));
  for (std::string tok; hs >> tok;) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos)
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char *key : {"sector", "N", "m", "tau", "R_box", "nodes"})
    if (!kv.count(key))
      throw ConfigError(std::string("field CSV header misses ") + key);
  SymmetrySector sec{parse_sector_kind(kv["sector"]), std::stoi(kv["N"]),
                     std::stoi(kv["m"]), kv["tau"] == "1"};
  auto grid = build_grid(sec, std::stod(kv["R_box"]),
                         static_cast<std::size_t>(std::stoul(kv["nodes"])));
  std::getline(in, line); // column names
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid->size()));
  std::size_t p = 0;
  while (std::getline(in, line) && p < grid->size()) {
    const auto comma = line.rfind(',');
    v[static_cast<Eigen::Index>(p++)] = std::stod(line.substr(comma + 1));
  }
  if (p != grid->size())
    throw GridMismatch("field CSV row count does not match its header");
  return Field(grid, std::move(v));
}

} // namespace nlsf
