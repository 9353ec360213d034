#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "fwdiss/analysis.hpp"
#include "fwdiss/core.hpp"
#include "fwdiss/error.hpp"
#include "fwdiss/kernel.hpp"
#include "fwdiss/profiles.hpp"
#include "fwdiss/solver.hpp"

namespace py = pybind11;
using namespace fwdiss;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Field to_field(const Grid& grid, const Array& values) {
  if (values.ndim() != 1) throw ConfigError("expected a one-dimensional array");
  return Field(grid, std::vector<double>(values.data(), values.data() + values.size()));
}

py::dict rate_fit_dict(const analysis::RateFit& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["t_min"] = f.t_min;
  d["t_max"] = f.t_max;
  d["residual_rms"] = f.residual_rms;
  d["with_log_factor"] = f.with_log_factor;
  d["points"] = f.points;
  return d;
}

py::dict trajectory_dict(const solver::Trajectory& traj) {
  const std::size_t n = traj.config.grid.size();
  Array snaps({static_cast<py::ssize_t>(traj.snapshots.size()), static_cast<py::ssize_t>(n)});
  std::vector<double> times;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto v = traj.snapshots[i].field.values();
    std::copy(v.begin(), v.end(), snaps.mutable_data() + i * n);
    times.push_back(traj.snapshots[i].t);
  }
  std::vector<double> t, mass, l2, linf;
  for (const auto& r : traj.diagnostics) {
    t.push_back(r.t);
    mass.push_back(r.mass);
    l2.push_back(r.l2);
    linf.push_back(r.linf);
  }
  py::dict diag;
  diag["t"] = to_array(t);
  diag["mass"] = to_array(mass);
  diag["l2"] = to_array(l2);
  diag["linf"] = to_array(linf);
  py::dict d;
  d["times"] = to_array(times);
  d["snapshots"] = snaps;
  d["diagnostics"] = diag;
  d["calM_partial"] = traj.calM_partial;
  d["calM_tail"] = traj.calM_tail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral solver, kernels, profiles and rate checks for the dissipative Fornberg-Whitham equation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::enum_<Frame>(m, "Frame").value("lab", Frame::lab).value("comoving", Frame::comoving);

  py::class_<Params>(m, "Params")
      .def(py::init([](double p, double B, double b, double mu) {
             Params pr{p, B, b, mu};
             pr.validate();
             return pr;
           }),
           py::arg("p") = 2.5, py::arg("B") = 1.0, py::arg("b") = 1.0, py::arg("mu") = 1.0)
      .def_readwrite("p", &Params::p)
      .def_readwrite("B", &Params::B)
      .def_readwrite("b", &Params::b)
      .def_readwrite("mu", &Params::mu)
      .def_property_readonly("drift_speed", &Params::drift_speed)
      .def("__repr__", [](const Params& p) {
        return "Params(p=" + format_double(p.p) + ", B=" + format_double(p.B) + ", b=" + format_double(p.b) +
               ", mu=" + format_double(p.mu) + ")";
      });

  py::class_<Grid>(m, "Grid")
      .def(py::init<double, std::size_t, Frame>(), py::arg("half_length"), py::arg("n_points"),
           py::arg("frame") = Frame::comoving)
      .def_property_readonly("half_length", &Grid::half_length)
      .def_property_readonly("n_points", &Grid::size)
      .def_property_readonly("frame", &Grid::frame)
      .def_property_readonly("dx", &Grid::dx)
      .def("nodes", [](const Grid& g) { return to_array(g.nodes()); });

  m.def("lq_norm", [](const Grid& g, const Array& u, double q) { return lq_norm(to_field(g, u), q); },
        py::arg("grid"), py::arg("values"), py::arg("q"));
  m.def("moment", [](const Grid& g, const Array& u, int order) { return moment(to_field(g, u), order).value; },
        py::arg("grid"), py::arg("values"), py::arg("order"));

  m.def("symbol", &kernel::symbol, py::arg("xi"), py::arg("t"), py::arg("params"), py::arg("frame"));
  m.def("heat_rate", &kernel::heat_rate, py::arg("q"));
  m.def("gap_exponent", &kernel::gap_exponent, py::arg("q"), py::arg("l"), py::arg("order"));
  m.def("kernel_gap", &kernel::kernel_gap, py::arg("t"), py::arg("l"), py::arg("q"), py::arg("order"),
        py::arg("params"), py::arg("grid"));
  m.def(
      "sample_kernel",
      [](const Grid& g, double t, const Params& pr, int l) { return to_array(kernel::sample_kernel(g, t, pr, l).values()); },
      py::arg("grid"), py::arg("t"), py::arg("params"), py::arg("l") = 0);
  m.def(
      "apply_semigroup",
      [](const Grid& g, const Array& u, double t, const Params& pr) {
        return to_array(kernel::apply_semigroup(to_field(g, u), t, pr).values());
      },
      py::arg("grid"), py::arg("values"), py::arg("t"), py::arg("params"));

  m.def("gaussian_power_mass", &profiles::gaussian_power_mass, py::arg("p"), py::arg("tau"), py::arg("mu"));
  m.def("w_p", &profiles::w_p, py::arg("x"), py::arg("params"));
  m.def("w_p_definitional", &profiles::w_p_definitional, py::arg("x"), py::arg("params"));
  m.def("W_p", &profiles::W_p, py::arg("x"), py::arg("t"), py::arg("params"));
  m.def(
      "theorem_profile",
      [](const Grid& g, double t, const Params& pr, double M, double mm, double calM) {
        return to_array(profiles::sample_theorem_profile(g, t, profiles::make_spec(pr, M, mm, calM)).values());
      },
      py::arg("grid"), py::arg("t"), py::arg("params"), py::arg("M"), py::arg("m") = 0.0, py::arg("calM") = 0.0);
  m.def(
      "duhamel_selfsim_check",
      [](double t, const Params& pr, double M, const Grid& g) {
        const auto c = profiles::duhamel_selfsim_check(t, profiles::make_spec(pr, M), g);
        py::dict d;
        d["distance"] = c.distance;
        d["reference_norm"] = c.reference_norm;
        d["relative"] = c.relative;
        d["singularity_warning"] = c.singularity_warning;
        return d;
      },
      py::arg("t"), py::arg("params"), py::arg("M"), py::arg("grid"));

  m.def(
      "integrate",
      [](const Grid& g, const Array& u0, const Params& pr, double t_end, double dt, std::vector<double> times,
         bool accumulate_calM) {
        solver::SolveConfig c;
        c.params = pr;
        c.grid = g;
        c.t_end = t_end;
        c.dt = dt;
        c.snapshot_times = times.empty() ? std::vector<double>{t_end} : std::move(times);
        c.accumulate_calM = accumulate_calM;
        const Field f = to_field(g, u0);
        py::gil_scoped_release release;
        solver::Trajectory traj = solver::integrate(f, c);
        py::gil_scoped_acquire acquire;
        return trajectory_dict(traj);
      },
      py::arg("grid"), py::arg("u0"), py::arg("params"), py::arg("t_end"), py::arg("dt"),
      py::arg("snapshot_times") = std::vector<double>{}, py::arg("accumulate_calM") = false);
  m.def(
      "picard_solve",
      [](const Grid& g, const Array& u0, double t, const Params& pr, int max_iter) {
        const auto r = solver::picard_solve(to_field(g, u0), t, pr, g, max_iter);
        py::dict d;
        d["solution"] = to_array(r.solution.values());
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["contraction_ratios"] = r.contraction_ratios;
        return d;
      },
      py::arg("grid"), py::arg("u0"), py::arg("t"), py::arg("params"), py::arg("max_iter") = 50);

  m.def(
      "rate_fit",
      [](const std::vector<double>& t, const std::vector<double>& v, double t_min, double t_max, bool log_factor) {
        if (t.size() != v.size()) throw ConfigError("rate_fit: t and values differ in length");
        std::vector<analysis::Sample> s;
        for (std::size_t i = 0; i < t.size(); ++i) s.push_back({t[i], v[i]});
        return rate_fit_dict(analysis::rate_fit(s, t_min, t_max, log_factor));
      },
      py::arg("t"), py::arg("values"), py::arg("t_min"), py::arg("t_max"), py::arg("with_log_factor") = false);
  m.def("limit_rate", [](double p, double q) { return analysis::limit_rate(profiles::regime_for(p), p, q); },
        py::arg("p"), py::arg("q"));
}
