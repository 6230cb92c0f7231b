#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pflow/config.hpp"
#include "pflow/error.hpp"
#include "pflow/io.hpp"
#include "pflow/validation.hpp"

namespace py = pybind11;
using namespace pflow;

namespace {

py::dict tail_dict(const TailEstimate& t) {
  py::dict d;
  d["infinite"] = t.infinite;
  d["value"] = t.value;
  return d;
}

py::dict limits_dict(const EnvelopeLimits& l) {
  py::dict d;
  d["high"] = tail_dict(l.high);
  d["low"] = tail_dict(l.low_neg);
  d["threshold"] = l.threshold();
  d["rho"] = l.rho;
  d["F"] = l.F;
  return d;
}

PresetParams preset_from_kwargs(const py::kwargs& kw) {
  PresetParams p;
  for (auto item : kw) {
    const auto key = py::cast<std::string>(item.first);
    const double value = py::cast<double>(item.second);
    if (key == "c") p.c = value;
    else if (key == "gamma") p.gamma = value;
    else if (key == "visc_amplitude") p.visc_amplitude = value;
    else if (key == "visc_exponent") p.visc_exponent = value;
    else if (key == "g") p.g = value;
    else if (key == "nu") p.nu = value;
    else throw InvalidArgument("make_preset: unknown parameter '" + key + "'");
  }
  return p;
}

}  // namespace

PYBIND11_MODULE(_pflow, m) {
  m.doc() = "Particle method for 1-D viscous compressible barotropic flow";

  // Translators run newest first, so the base class goes in first.
  auto& base = py::register_exception<Error>(m, "PflowError");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
  py::register_exception<AdmissibilityError>(m, "AdmissibilityError", base.ptr());
  py::register_exception<StiffnessError>(m, "StiffnessError", base.ptr());
  py::register_exception<NormalizationError>(m, "NormalizationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  // Fluid model
  py::class_<FluidModel>(m, "FluidModel")
      .def_property_readonly("kind", [](const FluidModel& f) { return to_string(f.kind()); })
      .def_property_readonly("m", &FluidModel::m)
      .def_property_readonly("L", &FluidModel::L)
      .def_property_readonly("rho_star", &FluidModel::rho_star)
      .def_property_readonly("uses_closed_forms", &FluidModel::uses_closed_forms)
      .def("P", &FluidModel::P)
      .def("mu", &FluidModel::mu)
      .def("probe_grid", &FluidModel::probe_grid)
      .def("with_quadrature", &FluidModel::with_quadrature);

  m.def(
      "make_preset",
      [](const std::string& kind, double mass, double L, const py::kwargs& kw) {
        return make_preset(model_kind_from_string(kind), preset_from_kwargs(kw), mass, L);
      },
      py::arg("kind"), py::arg("m") = 1.0, py::arg("L") = 1.0,
      "Preset model: saint_venant (g, nu), isentropic_gas or ideal_gas_entropy (c, gamma, visc_amplitude, visc_exponent).");
  m.def(
      "make_power_law",
      [](double coef, double exponent, double visc_coef, double visc_exponent, double mass, double L) {
        return make_power_law({coef, exponent, visc_coef, visc_exponent}, mass, L);
      },
      py::arg("coef"), py::arg("exponent"), py::arg("visc_coef"), py::arg("visc_exponent"),
      py::arg("m") = 1.0, py::arg("L") = 1.0);

  m.def("small_k", &small_k, py::arg("model"), py::arg("rho"));
  m.def("q_potential", &q_potential, py::arg("model"), py::arg("rho"));
  m.def("phi", &phi, py::arg("model"), py::arg("x"));
  m.def("cap_k", &cap_k, py::arg("model"), py::arg("x"));
  m.def("f_envelope", &f_envelope, py::arg("model"), py::arg("rho"));
  m.def("f_envelope_inverse", &f_envelope_inverse, py::arg("model"), py::arg("value"));
  m.def("f_envelope_limits", [](const FluidModel& f) { return limits_dict(f_envelope_limits(f)); });

  // Particles
  py::class_<ParticleState>(m, "ParticleState")
      .def(py::init<double, double, std::vector<double>, std::vector<double>>(), py::arg("L"),
           py::arg("t"), py::arg("x"), py::arg("v"))
      .def_property_readonly("n", &ParticleState::n)
      .def_property_readonly("t", &ParticleState::t)
      .def_property_readonly("L", &ParticleState::L)
      .def_property_readonly("x", [](const ParticleState& s) { return std::vector<double>(s.x().begin(), s.x().end()); })
      .def_property_readonly("v", [](const ParticleState& s) { return std::vector<double>(s.v().begin(), s.v().end()); })
      .def("in_domain", &ParticleState::in_domain);

  py::class_<DiscreteFunctionals>(m, "DiscreteFunctionals")
      .def_readonly("E_n", &DiscreteFunctionals::E_n)
      .def_readonly("W_n", &DiscreteFunctionals::W_n)
      .def_readonly("Z_n", &DiscreteFunctionals::Z_n)
      .def_readonly("H_n", &DiscreteFunctionals::H_n)
      .def_readonly("w", &DiscreteFunctionals::w);

  m.def("rhs", [](const FluidModel& f, const ParticleState& s) {
    const auto d = rhs(f, s);
    return py::make_tuple(d.dx, d.dv);
  });
  m.def("functionals", &functionals, py::arg("model"), py::arg("state"));
  m.def("energy_dissipation", &energy_dissipation, py::arg("model"), py::arg("state"));

  py::class_<SpacingBounds>(m, "SpacingBounds")
      .def_readonly("a", &SpacingBounds::a)
      .def_readonly("b", &SpacingBounds::b)
      .def_readonly("budget", &SpacingBounds::budget);
  m.def("spacing_bounds", py::overload_cast<const FluidModel&, double, double>(&spacing_bounds),
        py::arg("model"), py::arg("E_bar"), py::arg("W_bar"));

  // Initial data
  py::class_<InitialData>(m, "InitialData")
      .def_static("constant_density", &InitialData::constant_density, py::arg("model"), py::arg("value"))
      .def_static("cosine_density", &InitialData::cosine_density, py::arg("model"), py::arg("amplitude"),
                  py::arg("mode") = 1)
      .def_static("table_density", &InitialData::table_density, py::arg("model"), py::arg("x"), py::arg("rho"))
      .def("sine_velocity", &InitialData::sine_velocity, py::arg("amplitude"), py::arg("mode") = 1,
           py::return_value_policy::reference_internal)
      .def("table_velocity", &InitialData::table_velocity, py::arg("x"), py::arg("v"),
           py::return_value_policy::reference_internal)
      .def("zero_velocity", &InitialData::zero_velocity, py::return_value_policy::reference_internal)
      .def("rho0", &InitialData::rho0)
      .def("v0", &InitialData::v0);

  m.def("build_particles", &build_particles, py::arg("model"), py::arg("init"), py::arg("n"));

  py::class_<InitialBounds>(m, "InitialBounds")
      .def_readonly("E_bar", &InitialBounds::E_bar)
      .def_readonly("W_bar", &InitialBounds::W_bar)
      .def_readonly("Z_bar", &InitialBounds::Z_bar)
      .def_readonly("A_bar", &InitialBounds::A_bar)
      .def_readonly("M_bar", &InitialBounds::M_bar)
      .def_readonly("rho_min", &InitialBounds::rho_min);
  m.def("initial_bounds", &initial_bounds, py::arg("model"), py::arg("init"));

  m.def("admissibility", [](const FluidModel& f, const InitialData& init) {
    const auto r = admissibility(f, init);
    py::dict d;
    d["admissible"] = r.admissible;
    d["lhs"] = r.lhs;
    d["bounds"] = r.bounds;
    d["limits"] = limits_dict(r.limits);
    d["spacing"] = r.spacing ? py::cast(*r.spacing) : py::none();
    return d;
  });

  // Integration
  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init<>())
      .def_readwrite("rel_tol", &IntegratorConfig::rel_tol)
      .def_readwrite("abs_tol", &IntegratorConfig::abs_tol)
      .def_readwrite("dt_init", &IntegratorConfig::dt_init)
      .def_readwrite("dt_max", &IntegratorConfig::dt_max)
      .def_readwrite("max_steps", &IntegratorConfig::max_steps)
      .def_readwrite("snapshot_dt", &IntegratorConfig::snapshot_dt)
      .def_readwrite("T", &IntegratorConfig::T);

  py::class_<IntegrationStats>(m, "IntegrationStats")
      .def_readonly("accepted", &IntegrationStats::accepted)
      .def_readonly("rejected", &IntegrationStats::rejected)
      .def_readonly("domain_rejections", &IntegrationStats::domain_rejections)
      .def_readonly("min_dt", &IntegrationStats::min_dt)
      .def_readonly("max_dt", &IntegrationStats::max_dt);

  py::class_<Snapshot>(m, "Snapshot")
      .def_readonly("state", &Snapshot::state)
      .def_readonly("functionals", &Snapshot::functionals);

  py::class_<SnapshotSeries>(m, "SnapshotSeries")
      .def_readonly("T", &SnapshotSeries::T)
      .def_readonly("snapshots", &SnapshotSeries::snapshots)
      .def_readonly("stats", &SnapshotSeries::stats)
      .def_property_readonly("times", [](const SnapshotSeries& s) {
        std::vector<double> t;
        for (const auto& snap : s.snapshots) t.push_back(snap.state.t());
        return t;
      });

  m.def("simulate", &simulate, py::arg("model"), py::arg("state0"), py::arg("T"),
        py::arg("config") = IntegratorConfig{}, py::call_guard<py::gil_scoped_release>());

  // Reconstruction
  py::class_<ReconstructedField>(m, "ReconstructedField")
      .def_property_readonly("n", &ReconstructedField::n)
      .def_property_readonly("edges", &ReconstructedField::edges)
      .def_property_readonly("node_rho", &ReconstructedField::node_rho)
      .def_property_readonly("node_v", &ReconstructedField::node_v)
      .def("rho", &ReconstructedField::rho)
      .def("v", &ReconstructedField::v);
  m.def("reconstruct", &reconstruct, py::arg("model"), py::arg("state"));
  m.def("total_mass", &total_mass, py::arg("field"));
  m.def("continuous_E", &continuous_E, py::arg("model"), py::arg("field"));
  m.def("continuous_W", &continuous_W, py::arg("model"), py::arg("field"));

  // Validation
  py::class_<ConvergenceRow>(m, "ConvergenceRow")
      .def_readonly("n", &ConvergenceRow::n)
      .def_readonly("ok", &ConvergenceRow::ok)
      .def_readonly("error", &ConvergenceRow::error)
      .def_readonly("mass_error", &ConvergenceRow::mass_error)
      .def_readonly("continuity_residual", &ConvergenceRow::continuity_residual)
      .def_readonly("momentum_residual", &ConvergenceRow::momentum_residual)
      .def_readonly("E_gap", &ConvergenceRow::E_gap)
      .def_readonly("W_gap", &ConvergenceRow::W_gap)
      .def_readonly("rho_distance", &ConvergenceRow::rho_distance)
      .def_readonly("v_distance", &ConvergenceRow::v_distance)
      .def_readonly("rho_holder", &ConvergenceRow::rho_holder)
      .def_readonly("v_holder", &ConvergenceRow::v_holder);
  m.def("convergence_study", &convergence_study, py::arg("model"), py::arg("init"), py::arg("n_list"),
        py::arg("T"), py::arg("config") = IntegratorConfig{}, py::arg("grid_points") = 1024,
        py::call_guard<py::gil_scoped_release>());

  // Configuration
  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def_readonly("n", &SimulationConfig::n)
      .def_readonly("n_list", &SimulationConfig::n_list)
      .def_readonly("integrator", &SimulationConfig::integrator)
      .def("build_model", &SimulationConfig::build_model)
      .def("build_initial", &SimulationConfig::build_initial, py::arg("model"));
  m.def("parse_config_text", &parse_config_text, py::arg("text"));
  m.def("run_check", [](const SimulationConfig& cfg) {
    std::ostringstream out;
    const int code = run_check(cfg, out);
    return py::make_tuple(code, out.str());
  });
}
