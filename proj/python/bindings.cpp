#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlsf/errors.hpp"
#include "nlsf/functionals.hpp"
#include "nlsf/grid.hpp"
#include "nlsf/nonlinearity.hpp"
#include "nlsf/oracle.hpp"
#include "nlsf/solver.hpp"
#include "nlsf/symmetry.hpp"

namespace py = pybind11;
using namespace nlsf;

namespace {
// pybind11 holders cannot be shared_ptr<const T>.
using GridHolder = std::shared_ptr<ReducedGrid>;
GridHolder hold(const GridPtr &g) { return std::const_pointer_cast<ReducedGrid>(g); }
} // namespace

PYBIND11_MODULE(_nlsf, m) {
  m.doc() = "Ground-state solver for -Laplace u = g(u) in symmetry sectors";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NotInP>(m, "NotInP", base.ptr());
  py::register_exception<MaxIters>(m, "MaxIters", base.ptr());
  py::register_exception<BracketInvalid>(m, "BracketInvalid", base.ptr());

  py::enum_<SectorKind>(m, "SectorKind")
      .value("Radial", SectorKind::Radial)
      .value("BiradialO1", SectorKind::BiradialO1)
      .value("TriradialO2", SectorKind::TriradialO2);

  py::class_<SymmetrySector>(m, "SymmetrySector")
      .def(py::init([](SectorKind kind, int N, int m_split, bool tau) {
             SymmetrySector s{kind, N, m_split, tau};
             s.validate();
             return s;
           }),
           py::arg("kind"), py::arg("N"), py::arg("m") = 0,
           py::arg("tau") = false)
      .def_readonly("kind", &SymmetrySector::kind)
      .def_readonly("N", &SymmetrySector::dim_N)
      .def_readonly("m", &SymmetrySector::m_split)
      .def_readonly("tau", &SymmetrySector::tau_antisym);

  py::class_<NonlinearitySpec>(m, "NonlinearitySpec")
      .def_static("power", &NonlinearitySpec::power, py::arg("m"),
                  py::arg("p"), py::arg("xi0"), py::arg("N"))
      .def_static("cubic_quintic", &NonlinearitySpec::cubic_quintic,
                  py::arg("m"), py::arg("a"), py::arg("b"), py::arg("xi0"),
                  py::arg("N"))
      .def("g", &NonlinearitySpec::g)
      .def("G", &NonlinearitySpec::G)
      .def_property_readonly("xi0", &NonlinearitySpec::xi0)
      .def_property_readonly("xi1", &NonlinearitySpec::xi1)
      .def_property_readonly("truncated", &NonlinearitySpec::truncated)
      .def_property_readonly("N", &NonlinearitySpec::dim_N);
  m.def("truncate", [](const NonlinearitySpec &s) { return nlsf::truncate(s); });

  py::class_<ReducedGrid, GridHolder>(m, "Grid")
      .def_property_readonly("sector", &ReducedGrid::sector)
      .def_property_readonly("R", &ReducedGrid::box_radius)
      .def_property_readonly("nodes", &ReducedGrid::nodes_per_axis)
      .def_property_readonly("size", &ReducedGrid::size)
      .def_property_readonly("spacing", &ReducedGrid::spacing);
  m.def(
      "build_grid",
      [](const SymmetrySector &s, double R, std::size_t n) {
        return hold(build_grid(s, R, n));
      },
      py::arg("sector"), py::arg("R"), py::arg("nodes"));

  py::class_<Field>(m, "Field")
      .def_property_readonly("grid",
                             [](const Field &f) { return hold(f.grid_ptr()); })
      .def_property_readonly("values",
                             [](const Field &f) -> Eigen::VectorXd {
                               return f.values();
                             });
  m.def(
      "sample_radial",
      [](const GridHolder &g, const std::function<double(double)> &f) {
        return sample_radial(g, f);
      },
      py::arg("grid"), py::arg("f"));
  m.def("psi", &psi);

  py::class_<VariationalState>(m, "VariationalState")
      .def_readonly("J", &VariationalState::J)
      .def_readonly("M", &VariationalState::M)
      .def_readonly("psi", &VariationalState::psi)
      .def_readonly("intG", &VariationalState::intG);
  m.def("evaluate", &evaluate);
  m.def("theta", &theta);

  py::class_<SolveConfig>(m, "SolveConfig")
      .def(py::init<>())
      .def_readwrite("tol_grad", &SolveConfig::tol_grad)
      .def_readwrite("max_iters", &SolveConfig::max_iters)
      .def_readwrite("newton_iters", &SolveConfig::newton_iters)
      .def_readwrite("max_seeds", &SolveConfig::max_seeds);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("state", &SolveReport::state)
      .def_readonly("theta", &SolveReport::theta)
      .def_readonly("grad_norm", &SolveReport::grad_norm)
      .def_readonly("iters", &SolveReport::iters)
      .def_readonly("residual_pde", &SolveReport::residual_pde)
      .def_readonly("pohozaev_residual", &SolveReport::pohozaev_residual)
      .def_readonly("stop_reason", &SolveReport::stop_reason)
      .def_readonly("solution", &SolveReport::solution)
      .def_readonly("iterate", &SolveReport::iterate);

  m.def(
      "default_seed",
      [](const GridHolder &g, const NonlinearitySpec &s, double R) {
        return default_seed(g, s, R);
      },
      py::arg("grid"), py::arg("spec"), py::arg("R_bump") = 1.0);
  m.def(
      "initializer",
      [](const GridHolder &g, const NonlinearitySpec &s, double R) {
        return initializer(g, s, R);
      },
      py::arg("grid"), py::arg("spec"), py::arg("R_bump"));
  m.def("minimize", &minimize, py::arg("seed"), py::arg("spec"),
        py::arg("config") = SolveConfig{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<LedgerCheck>(m, "LedgerCheck")
      .def_readonly("name", &LedgerCheck::name)
      .def_readonly("value", &LedgerCheck::value)
      .def_readonly("threshold", &LedgerCheck::threshold)
      .def_readonly("passed", &LedgerCheck::passed);
  py::class_<VerificationLedger>(m, "VerificationLedger")
      .def_readonly("checks", &VerificationLedger::checks)
      .def_property_readonly("all_passed", &VerificationLedger::all_passed);
  m.def("verify", &verify_solution);

  py::class_<RadialProfile>(m, "RadialProfile")
      .def_readonly("N", &RadialProfile::dim_N)
      .def_readonly("u0", &RadialProfile::u0)
      .def_readonly("r", &RadialProfile::r)
      .def_readonly("u", &RadialProfile::u)
      .def_readonly("J", &RadialProfile::J)
      .def_readonly("theta", &RadialProfile::theta);
  m.def("shoot",
        [](const NonlinearitySpec &spec, int N) { return shoot(spec, N); },
        py::arg("spec"), py::arg("N"));
}
