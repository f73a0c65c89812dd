#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "micellar/common.hpp"
#include "micellar/diagnostics.hpp"
#include "micellar/micromacro.hpp"
#include "micellar/runio.hpp"

namespace py = pybind11;
using namespace micellar;

namespace {

// owns one simulator plus its evolving state
struct Session {
  explicit Session(const SimConfig& cfg) : sim(cfg), st(sim.init_scenario()), diag(sim) {}

  double dt() const {
    return sim.config().dt > 0.0 ? sim.config().dt : sim.default_dt(st);
  }

  void step(int n) {
    const double h = dt();
    for (int i = 0; i < n; ++i) sim.step(st, h);
  }

  Simulator sim;
  SimState st;
  Diagnostics diag;
};

py::array_t<double> field_array(const DistributionField& f) {
  py::array_t<double> out({f.nx, f.nq});
  std::copy(f.data.begin(), f.data.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "structure-preserving simulator for reactive micro-macro polymer flows";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantViolation", PyExc_RuntimeError);

  py::enum_<PotentialKind>(m, "PotentialKind")
      .value("hookean", PotentialKind::hookean)
      .value("fene", PotentialKind::fene);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("d_x", &SimConfig::d_x)
      .def_readwrite("d_q", &SimConfig::d_q)
      .def_readwrite("n_x", &SimConfig::n_x)
      .def_readwrite("n_q", &SimConfig::n_q)
      .def_readwrite("box_length", &SimConfig::box_length)
      .def_readwrite("q_radius", &SimConfig::q_radius)
      .def_readwrite("potential_kind", &SimConfig::potential_kind)
      .def_readwrite("h_b", &SimConfig::h_b)
      .def_readwrite("fene_k", &SimConfig::fene_k)
      .def_readwrite("fene_b0", &SimConfig::fene_b0)
      .def_readwrite("mu", &SimConfig::mu)
      .def_readwrite("lambda_", &SimConfig::lambda)
      .def_readwrite("k1", &SimConfig::k1)
      .def_readwrite("k2", &SimConfig::k2)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("t_end", &SimConfig::t_end)
      .def_readwrite("scheme_order", &SimConfig::scheme_order)
      .def_readwrite("scenario", &SimConfig::scenario)
      .def_readwrite("amplitude", &SimConfig::amplitude)
      .def_readwrite("eta", &SimConfig::eta)
      .def_readwrite("sobolev_s_max", &SimConfig::sobolev_s_max)
      .def_readwrite("cadence", &SimConfig::cadence)
      .def_readwrite("out_dir", &SimConfig::out_dir)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("limiter", &SimConfig::limiter)
      .def_readwrite("snapshots", &SimConfig::snapshots);

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("kinetic", &EnergyReport::kinetic)
      .def_readonly("free_energy", &EnergyReport::free_energy)
      .def_readonly("total", &EnergyReport::total)
      .def_readonly("d_u", &EnergyReport::d_u)
      .def_readonly("d_micro", &EnergyReport::d_micro)
      .def_readonly("d_r", &EnergyReport::d_r)
      .def_readonly("residual", &EnergyReport::residual);

  py::class_<SobolevReport>(m, "SobolevReport")
      .def_readonly("s", &SobolevReport::s)
      .def_readonly("eta", &SobolevReport::eta)
      .def_readonly("e_x", &SobolevReport::e_x)
      .def_readonly("d_x", &SobolevReport::d_x)
      .def_readonly("e_rho", &SobolevReport::e_rho)
      .def_readonly("d_rho", &SobolevReport::d_rho)
      .def_readonly("e_j", &SobolevReport::e_j)
      .def_readonly("d_j", &SobolevReport::d_j)
      .def_readonly("e_mix", &SobolevReport::e_mix)
      .def_readonly("d_mix", &SobolevReport::d_mix)
      .def_readonly("e_total", &SobolevReport::e_total)
      .def_readonly("d_total", &SobolevReport::d_total)
      .def_readonly("e_plain", &SobolevReport::e_plain)
      .def_readonly("d_plain", &SobolevReport::d_plain)
      .def_readonly("part_fluid", &SobolevReport::part_fluid)
      .def_readonly("part_rho", &SobolevReport::part_rho)
      .def_readonly("part_fp", &SobolevReport::part_fp)
      .def_readonly("part_moment", &SobolevReport::part_moment)
      .def_readonly("part_reaction", &SobolevReport::part_reaction)
      .def_readonly("equiv_upper", &SobolevReport::equiv_upper)
      .def_readonly("equiv_lower", &SobolevReport::equiv_lower);

  py::class_<Session>(m, "Session")
      .def(py::init<const SimConfig&>())
      .def("step", &Session::step, py::arg("n") = 1)
      .def_property_readonly("t", [](const Session& s) { return s.st.t; })
      .def_property_readonly("dt", &Session::dt)
      .def("energy", [](const Session& s) { return s.diag.energy(s.st); })
      .def("sobolev", [](const Session& s, int order) { return s.diag.sobolev(s.st, order); },
           py::arg("s") = 2)
      .def("total_mass", [](const Session& s) { return s.sim.total_mass(s.st); })
      .def("min_density", [](const Session& s) { return s.sim.min_density(s.st); })
      .def("rho_constraint_max",
           [](const Session& s) { return s.diag.rho_constraint_max(s.st); })
      .def("cancellation_residual",
           [](const Session& s, bool inject) {
             return std::max(s.diag.cancellation_residual(s.st, Species::A, inject),
                             s.diag.cancellation_residual(s.st, Species::B, inject));
           },
           py::arg("inject_mismatch") = false)
      .def("psi_a", [](const Session& s) { return field_array(s.st.psi_a); })
      .def("psi_b", [](const Session& s) { return field_array(s.st.psi_b); })
      .def("u", [](const Session& s) {
        py::list out;
        for (const auto& c : s.st.u.comp) {
          py::array_t<double> a(static_cast<py::ssize_t>(c.size()));
          std::copy(c.begin(), c.end(), a.mutable_data());
          out.append(a);
        }
        return out;
      });

  m.def(
      "spectral_gap",
      [](double h, int n_q, int d_q, double radius) {
        const Potential pb = Potential::hookean(d_q, h);
        const QGrid g = QGrid::for_potential(pb, n_q, radius);
        const MaxwellianPair mw = normalize_maxwellians(pb, g);
        return FokkerPlanckOperator(g, mw.b).spectral_gap();
      },
      py::arg("h") = 1.0, py::arg("n_q") = 64, py::arg("d_q") = 1, py::arg("radius") = 0.0);

  m.def(
      "eigenvalues",
      [](double h, int n_q, int d_q, int count, double radius) {
        const Potential pb = Potential::hookean(d_q, h);
        const QGrid g = QGrid::for_potential(pb, n_q, radius);
        const MaxwellianPair mw = normalize_maxwellians(pb, g);
        return FokkerPlanckOperator(g, mw.b).eigenvalues(count);
      },
      py::arg("h") = 1.0, py::arg("n_q") = 64, py::arg("d_q") = 1, py::arg("count") = 5,
      py::arg("radius") = 0.0);

  m.def("parse_config", &parse_config_text, py::arg("text"),
        "parse a key=value configuration string");
  m.def("manifest_hash", &manifest_hash, py::arg("config"));
}
