#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlnorm/continuation.hpp"
#include "qlnorm/diagnostics.hpp"
#include "qlnorm/dual.hpp"
#include "qlnorm/error.hpp"
#include "qlnorm/flow.hpp"
#include "qlnorm/io.hpp"
#include "qlnorm/mpass.hpp"
#include "qlnorm/params.hpp"
#include "qlnorm/shoot.hpp"

namespace py = pybind11;
using namespace qlnorm;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Normalized solutions of the radial quasi-linear Schrodinger problem";

  py::register_exception<Error>(m, "QlnormError", PyExc_RuntimeError);

  py::enum_<Regime>(m, "Regime")
      .value("Subcritical", Regime::Subcritical)
      .value("MassCritical", Regime::MassCritical)
      .value("Intermediate", Regime::Intermediate)
      .value("Critical", Regime::Critical)
      .value("Supercritical", Regime::Supercritical)
      .value("Inadmissible", Regime::Inadmissible);
  py::enum_<Classification>(m, "Classification")
      .value("GlobalMin", Classification::GlobalMin)
      .value("LocalMin", Classification::LocalMin)
      .value("MountainPass", Classification::MountainPass)
      .value("Failed", Classification::Failed);

  py::class_<Params>(m, "Params")
      .def(py::init([](int N, double p, double c, double mu) { return Params{N, p, c, mu}; }),
           py::arg("N") = 3, py::arg("p") = 3.0, py::arg("c") = 1.0, py::arg("mu") = 0.0)
      .def_readwrite("N", &Params::N)
      .def_readwrite("p", &Params::p)
      .def_readwrite("c", &Params::c)
      .def_readwrite("mu", &Params::mu)
      .def("validate", &Params::validate);
  m.def("classify", &classify);
  m.def("lower_exponent", &lower_exponent);
  m.def("upper_exponent", &upper_exponent);

  py::class_<RadialGrid, std::shared_ptr<RadialGrid>>(m, "RadialGrid")
      .def_readonly("N", &RadialGrid::N)
      .def_readonly("R_max", &RadialGrid::R_max)
      .def_readonly("n", &RadialGrid::n)
      .def_readonly("h", &RadialGrid::h)
      .def_readonly("r", &RadialGrid::r)
      .def_readonly("w", &RadialGrid::w);
  m.def("build_grid", [](int N, double R, int n) { return std::const_pointer_cast<RadialGrid>(build_grid(N, R, n)); },
        py::arg("N"), py::arg("R_max"), py::arg("n"));

  py::class_<RadialField>(m, "RadialField")
      .def(py::init([](std::shared_ptr<RadialGrid> g, Vec u) { return RadialField(g, std::move(u)); }))
      .def_property_readonly("grid", [](const RadialField& f) { return std::const_pointer_cast<RadialGrid>(f.grid); })
      .def_readwrite("u", &RadialField::u);

  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("grad2", &EnergyBreakdown::grad2)
      .def_readonly("grad4", &EnergyBreakdown::grad4)
      .def_readonly("quasi", &EnergyBreakdown::quasi)
      .def_readonly("pot", &EnergyBreakdown::pot)
      .def_readonly("mass", &EnergyBreakdown::mass);
  m.def("breakdown", &breakdown);
  m.def("mass", &mass);
  m.def("J_mu", &J_mu);
  m.def("Q_mu", &Q_mu);
  m.def("multiplier", py::overload_cast<const RadialField&, double, double>(&multiplier));
  m.def("euler_lagrange", &euler_lagrange);
  m.def("dilate", &dilate);
  m.def("normalize_mass", &normalize_mass);
  m.def("barrier_value", py::overload_cast<const RadialField&>(&barrier_value));
  m.def("dilation_profile", [](const EnergyBreakdown& b, double mu, double p, int N, double t) {
    const auto d = dilation_profile(b, mu, p, N, t);
    return py::make_tuple(d.J, d.Q);
  });

  py::class_<FlowConfig>(m, "FlowConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &FlowConfig::max_iters)
      .def_readwrite("grad_tol", &FlowConfig::grad_tol)
      .def_readwrite("q_tol", &FlowConfig::q_tol);
  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("field", &SolveReport::field)
      .def_readonly("lam", &SolveReport::lambda)
      .def_readonly("J", &SolveReport::J_value)
      .def_readonly("Q", &SolveReport::Q_value)
      .def_readonly("pohozaev_residual", &SolveReport::pohozaev_residual)
      .def_readonly("grad_residual", &SolveReport::grad_residual)
      .def_readonly("iters", &SolveReport::iters)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("classification", &SolveReport::classification)
      .def_readonly("mu", &SolveReport::mu)
      .def_readonly("c", &SolveReport::c)
      .def_readonly("note", &SolveReport::note);

  auto grid_arg = [](std::shared_ptr<RadialGrid> g) { return GridPtr(std::move(g)); };
  m.def("global_minimize",
        [=](const Params& prm, std::shared_ptr<RadialGrid> g, const FlowConfig& cfg) {
          return global_minimize(prm, grid_arg(g), cfg);
        },
        py::arg("params"), py::arg("grid"), py::arg("config") = FlowConfig{});
  m.def("minimize_local",
        [](const Params& prm, double k0, const RadialField& init, const FlowConfig& cfg) {
          return minimize_local(prm, k0, cfg, init);
        },
        py::arg("params"), py::arg("k0"), py::arg("init"), py::arg("config") = FlowConfig{});
  m.def("calibrate_k0",
        [=](const Params& prm, std::shared_ptr<RadialGrid> g, int probes, std::uint64_t seed) {
          return calibrate_k0(prm, grid_arg(g), probes, seed);
        },
        py::arg("params"), py::arg("grid"), py::arg("probes") = 60, py::arg("seed") = 1);
  m.def("estimate_cpn",
        [=](double p, int N, double lo, double hi, std::shared_ptr<RadialGrid> g) {
          const auto e = estimate_cpn(p, N, lo, hi, grid_arg(g), FlowConfig{});
          return py::make_tuple(e.c, e.lo, e.hi);
        },
        py::arg("p"), py::arg("N"), py::arg("c_lo"), py::arg("c_hi"), py::arg("grid"));

  py::class_<MPReport>(m, "MPReport")
      .def_readonly("gamma", &MPReport::gamma)
      .def_readonly("peak", &MPReport::peak)
      .def_readonly("path_values", &MPReport::path_values)
      .def_readonly("max_history", &MPReport::max_history)
      .def_readonly("sweeps", &MPReport::sweeps);
  m.def("mountain_pass",
        [](const Params& prm, double k0, const RadialField& u1, double ring_floor) {
          return mountain_pass(prm, k0, u1, ring_floor, MPassConfig{});
        },
        py::arg("params"), py::arg("k0"), py::arg("u1"), py::arg("ring_floor"));

  py::class_<ContinuationRow>(m, "ContinuationRow")
      .def_readonly("mu", &ContinuationRow::mu)
      .def_readonly("J", &ContinuationRow::J)
      .def_readonly("mu_grad4", &ContinuationRow::mu_grad4)
      .def_readonly("lam", &ContinuationRow::lambda)
      .def_readonly("converged", &ContinuationRow::converged);
  py::class_<ContinuationTrace>(m, "ContinuationTrace")
      .def_readonly("rows", &ContinuationTrace::rows)
      .def_readonly("final_field", &ContinuationTrace::final_field)
      .def_readonly("truncated", &ContinuationTrace::truncated)
      .def_readonly("note", &ContinuationTrace::note)
      .def("csv", &ContinuationTrace::csv);
  m.def("mu_schedule", &mu_schedule);
  m.def("continue_solve",
        [=](Classification kind, const Params& prm, std::shared_ptr<RadialGrid> g,
            const std::vector<double>& schedule) {
          return continue_solve(kind, prm, grid_arg(g), schedule, ContinuationConfig{});
        });
  m.def("classify_limit", &classify_limit, py::arg("trace"), py::arg("grad_tol") = 1e-6);

  py::class_<IdentityReport>(m, "IdentityReport")
      .def_readonly("name", &IdentityReport::name)
      .def_readonly("rel_residual", &IdentityReport::rel_residual)
      .def_readonly("passed", &IdentityReport::pass)
      .def_readonly("skipped", &IdentityReport::skipped);
  m.def("identity_suite", &identity_suite);
  m.def("pohozaev_residual",
        [](const RadialField& u, double lam, double p, int N) { return pohozaev_residual(u, lam, p, N).rel_residual; });

  py::class_<DualTransform>(m, "DualTransform")
      .def(py::init<double, int>(), py::arg("s_max") = 1e6, py::arg("n") = 4000)
      .def("f", &DualTransform::f)
      .def("f_prime", &DualTransform::f_prime)
      .def("f_inv", &DualTransform::f_inv);
  m.def("to_primal", &to_primal);

  py::class_<ShootConfig>(m, "ShootConfig")
      .def(py::init<>())
      .def_readwrite("lam", &ShootConfig::lambda)
      .def_readwrite("r_max", &ShootConfig::r_max)
      .def_readwrite("step", &ShootConfig::step);
  py::class_<ShotResult>(m, "ShotResult")
      .def_readonly("v0", &ShotResult::v0)
      .def_readonly("v", &ShotResult::v)
      .def("field", &ShotResult::field);
  m.def("find_ground", &find_ground);
  py::class_<DecayReport>(m, "DecayReport")
      .def_readonly("slope", &DecayReport::slope)
      .def_readonly("C_fit", &DecayReport::C_fit)
      .def_readonly("C_integral", &DecayReport::C_integral);
  m.def("decay_fit", &decay_fit, py::arg("shot"), py::arg("transform"), py::arg("p"), py::arg("N"),
        py::arg("window") = std::pair<double, double>{0.0, 0.0});
  m.def("l2_membership", &l2_membership);

  m.def("format_solution", &format_solution);
  m.def("parse_solution", [](const std::string& text) {
    auto s = parse_solution(text);
    return py::make_tuple(s.params, s.field);
  });
}
