// Python module nnls._core. Fields cross the boundary as Field objects that
// convert to and from complex NumPy arrays; configs and reports as JSON text.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nnls/experiments.hpp"
#include "nnls/invariants.hpp"
#include "nnls/linops.hpp"
#include "nnls/modulation.hpp"
#include "nnls/modulation_rhs.hpp"
#include "nnls/solitons.hpp"

namespace py = pybind11;
using namespace nnls;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(std::span<const double> v) { return py::array_t<double>(v.size(), v.data()); }
CArray to_numpy(const Field& f) { return CArray(f.size(), f.values().data()); }

Field from_numpy(const Grid& g, const CArray& a) {
  if (a.ndim() != 1 || a.shape(0) != g.size()) throw ConfigError("array length must equal the grid size");
  return Field(g, std::vector<cplx>(a.data(), a.data() + a.shape(0)));
}

py::dict sample_dict(const ModulationSample& s) {
  py::dict d;
  d["time"] = s.time;
  d["theta"] = s.theta;
  d["alpha"] = s.alpha;
  d["a_e"] = s.a_e;
  d["b_e"] = s.b_e;
  d["a_o"] = s.a_o;
  d["b_o"] = s.b_o;
  d["eta_e_h1"] = s.eta_e_h1;
  d["eta_o_h1"] = s.eta_o_h1;
  if (s.has_rhs) {
    d["theta_dot"] = s.theta_dot;
    d["alpha_dot"] = s.alpha_dot;
    d["a_e_dot"] = s.a_e_dot;
    d["b_e_dot"] = s.b_e_dot;
    d["a_o_dot"] = s.a_o_dot;
    d["b_o_dot"] = s.b_o_dot;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical lab for the nonlocal NLS i u_t - u_xx = u^2 conj(u(-x))";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularEvaluation>(m, "SingularEvaluation", PyExc_ArithmeticError);
  py::register_exception<DegenerateState>(m, "DegenerateState", PyExc_ArithmeticError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, double>(), py::arg("n") = 1024, py::arg("length") = 40.0)
      .def_property_readonly("n", &Grid::size)
      .def_property_readonly("length", &Grid::length)
      .def_property_readonly("spacing", &Grid::spacing)
      .def("points", [](const Grid& g) { return to_numpy(g.points()); })
      .def("wavenumbers", [](const Grid& g) { return to_numpy(g.wavenumbers()); });

  py::class_<Field>(m, "Field")
      .def(py::init([](const Grid& g, const CArray& a) { return from_numpy(g, a); }))
      .def(py::init<Grid>())
      .def_property_readonly("grid", &Field::grid)
      .def("values", [](const Field& f) { return to_numpy(f); })
      .def("__len__", &Field::size)
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
      .def("__mul__", [](const Field& a, cplx s) { return a * s; })
      .def("__rmul__", [](const Field& a, cplx s) { return s * a; })
      .def("__neg__", [](const Field& a) { return -a; });

  m.def("reflect", &reflect);
  m.def("reflect_conjugate", &reflect_conjugate);
  m.def("derivative", &derivative, py::arg("f"), py::arg("order") = 1);
  m.def("norm_hs", &norm_hs, py::arg("f"), py::arg("s"));
  m.def("norm_lp", &norm_lp, py::arg("f"), py::arg("p"));
  m.def("inner", &inner);

  m.def("ground_state", &ground_state, py::arg("alpha"), py::arg("grid"));
  m.def("standing_wave", &standing_wave, py::arg("alpha"), py::arg("t"), py::arg("grid"));
  m.def("two_param_soliton", &two_param_soliton, py::arg("alpha"), py::arg("beta"), py::arg("t"), py::arg("grid"));
  m.def("blowup_time", &blowup_time, py::arg("alpha"), py::arg("beta"));
  m.def("q_profiles", [](const Grid& g) {
    const QProfiles& p = q_profiles(g);
    py::dict d;
    d["q"] = p.q;
    d["q_prime"] = p.q_prime;
    d["dx_q"] = p.dx_q;
    d["x_q"] = p.x_q;
    return d;
  });

  m.def("quasipower", &quasipower);
  m.def("hamiltonian", &hamiltonian);
  m.def("distance_to_q", [](const Field& u) {
    const DistanceToQ d = distance_to_q(u);
    return py::make_tuple(d.distance, d.phase);
  });

  m.def(
      "evolve",
      [](const Field& u0, double dt, double t_end, const std::string& scheme, int record_every, bool nonlocal,
         bool track_modulation) {
        SolverConfig c;
        c.dt = dt;
        c.t_end = t_end;
        c.scheme = scheme_from_string(scheme);
        c.record_every = record_every;
        c.nonlocal = nonlocal;
        std::optional<ModulationTracker> tracker;
        RecordHook hook;
        if (track_modulation) {
          tracker.emplace();
          hook = tracker->hook();
        }
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = evolve(u0, c, hook);
        }
        py::dict d;
        std::vector<double> l2, linf, h1;
        for (const auto& x : tr.diagnostics) {
          l2.push_back(x.l2);
          linf.push_back(x.linf);
          h1.push_back(x.h1);
        }
        d["times"] = tr.times;
        d["l2"] = l2;
        d["linf"] = linf;
        d["h1"] = h1;
        d["termination"] = to_string(tr.termination);
        d["final_time"] = tr.final_time;
        d["final_state"] = tr.final_state ? py::cast(*tr.final_state) : py::none();
        d["blowup_time"] = tr.blowup ? py::cast(tr.blowup->time) : py::none();
        if (tracker) {
          py::list samples;
          for (const auto& s : tracker->samples()) samples.append(sample_dict(s));
          d["modulation"] = samples;
        }
        return d;
      },
      py::arg("u0"), py::arg("dt") = 1e-3, py::arg("t_end") = 1.0, py::arg("scheme") = "if_rk4",
      py::arg("record_every") = 1, py::arg("nonlocal") = true, py::arg("track_modulation") = false);

  m.def(
      "fit_modulation",
      [](const Field& u, double theta, double alpha) {
        const ModulationFit f = fit_modulation(u, {theta, alpha});
        ModulationSample s = summarize(decompose(u, f.theta, f.alpha), 0.0);
        py::dict d = sample_dict(s);
        d.attr("pop")("time");
        d["iterations"] = f.iterations;
        return d;
      },
      py::arg("u"), py::arg("theta") = 0.0, py::arg("alpha") = 1.0);

  m.def("identity_residuals", [](const Grid& g, std::uint64_t seed) {
    py::dict d;
    for (const auto& e : identity_suite(g, seed).entries) d[py::str(e.name)] = e.value;
    for (const auto& e : root_space_check(g).entries) d[py::str(e.name)] = e.value;
    return d;
  }, py::arg("grid"), py::arg("seed") = 1);

  m.def(
      "spectrum",
      [](const std::string& op, int n_eigs, const Grid& g) {
        const SpectrumReport s = discrete_spectrum(operator_kind_from_string(op), n_eigs, g);
        py::dict d;
        d["eigenvalues"] = s.eigenvalues;
        d["zero_cluster"] = s.zero_cluster;
        d["gap_count"] = s.gap_count;
        return d;
      },
      py::arg("operator"), py::arg("n_eigs"), py::arg("grid"));

  m.def("canonical_config", [](const std::string& text) { return parse_config(json::parse(text)).to_json().dump(); });
  m.def("content_hash", [](const std::string& text) { return content_hash(json::parse(text)); });
  m.def("run_scenario", [](const std::string& text) {
    const ScenarioConfig cfg = parse_config(json::parse(text));
    RunReport r;
    {
      py::gil_scoped_release release;
      r = run_scenario(cfg);
    }
    return r.to_json().dump();
  });
}
