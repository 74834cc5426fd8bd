#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "preyswitch/connection.hpp"
#include "preyswitch/error.hpp"
#include "preyswitch/flow.hpp"
#include "preyswitch/io.hpp"
#include "preyswitch/model.hpp"
#include "preyswitch/sliding.hpp"

namespace py = pybind11;
using namespace preyswitch;

namespace {

Parameters to_params(const py::dict& d) {
  RawParameters raw;
  auto get = [&](const char* key) {
    if (!d.contains(key)) throw Error(ErrorKind::InvalidConfig, std::string("missing parameter '") + key + "'");
    return d[key].cast<double>();
  };
  raw.r1 = get("r1");
  raw.r2 = get("r2");
  raw.a_q = get("a_q");
  raw.q1 = get("q1");
  raw.q2 = get("q2");
  raw.beta1 = get("beta1");
  raw.beta2 = get("beta2");
  raw.m = get("m");
  raw.e = get("e");
  return validate_parameters(raw);
}

IntegratorConfig to_cfg(const py::object& tol) {
  IntegratorConfig cfg;
  if (!tol.is_none()) cfg = cfg.scaled(tol.cast<double>() / cfg.rel_tol);
  cfg.validate();
  return cfg;
}

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Filippov prey-switching model: sliding dynamics and Shilnikov connection search";

  static py::exception<Error> error_type(m, "PreyswitchError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  m.def("load_params", [](const std::string& path) { return json_loads(raw_parameters_json(load_raw_parameters(path))); },
        py::arg("path"));
  m.def("validate", [](const py::dict& d) {
    const Parameters p = to_params(d);
    return py::dict(py::arg("phi") = p.phi(), py::arg("tau") = p.tau(), py::arg("b_q") = p.b_q(),
                    py::arg("focus_condition") = focus_condition(p));
  });
  m.def("classify", [](const py::dict& d, double x, double z) {
    return std::string(to_string(classify_sigma_point({x, z}, to_params(d))));
  });
  m.def("sliding_field", [](const py::dict& d, double x, double z, bool generic) {
    return eval_sliding({x, z}, to_params(d), generic ? SlidingMode::GenericFilippov : SlidingMode::ClosedForm);
  }, py::arg("params"), py::arg("x"), py::arg("z"), py::arg("generic") = false);
  m.def("focus", [](const py::dict& d) {
    const PseudoEquilibrium f = classify_focus(to_params(d));
    return py::dict(py::arg("x") = f.location.x, py::arg("z") = f.location.z, py::arg("alpha") = f.alpha,
                    py::arg("beta") = f.beta_imag, py::arg("kind") = std::string(to_string(f.kind)));
  });
  m.def("first_integral_F", [](const py::dict& d, double x, double z) { return first_integral_F(x, z, to_params(d)); });
  m.def("lv_period", [](const py::dict& d, double x0, py::object tol) {
    return lv_period(x0, to_cfg(tol), to_params(d)).period;
  }, py::arg("params"), py::arg("x0"), py::arg("tol") = py::none());
  m.def("mu_point", [](const py::dict& d, double x0, py::object tol) {
    const MuPoint p = mu_point(x0, to_params(d), to_cfg(tol));
    return py::make_tuple(p.u, p.v);
  }, py::arg("params"), py::arg("x0"), py::arg("tol") = py::none());
  m.def("mu_curve", [](const py::dict& d, const std::vector<double>& grid, py::object tol, unsigned threads) {
    const IntegratorConfig cfg = to_cfg(tol);
    const Parameters p = to_params(d);
    MuCurve curve;
    {
      py::gil_scoped_release release;
      curve = mu_curve(grid, p, cfg, threads);
    }
    py::list out;
    for (const MuPoint& s : curve.samples) out.append(py::make_tuple(s.x0, s.u, s.v));
    return out;
  }, py::arg("params"), py::arg("grid"), py::arg("tol") = py::none(), py::arg("threads") = 1);
  m.def("distance_to_connection", [](const py::dict& d, py::object tol) {
    const ConnectionDistance c = distance_to_connection(to_params(d), to_cfg(tol));
    return py::make_tuple(c.D, c.x0);
  }, py::arg("params"), py::arg("tol") = py::none());
  m.def("find_connection", [](const py::dict& d, double lo, double hi, py::object tol) {
    const IntegratorConfig cfg = to_cfg(tol);
    const Parameters p = to_params(d);
    std::string text;
    {
      py::gil_scoped_release release;
      text = certificate_json(find_shilnikov(p, lo, hi, cfg));
    }
    return json_loads(text);
  }, py::arg("params"), py::arg("beta1_lo") = 0.994, py::arg("beta1_hi") = 10.0, py::arg("tol") = py::none());
  m.def("verify_connection", [](const py::dict& d, double x0, py::object tol) {
    return json_loads(certificate_json(verify_connection(to_params(d), x0, to_cfg(tol))));
  }, py::arg("params"), py::arg("x0"), py::arg("tol") = py::none());
  m.def("build_n_point", [](const py::dict& d, double x0, double r2, py::object tol) {
    const IntegratorConfig cfg = to_cfg(tol);
    return json_loads(n_point_json(build_N_point(x0, r2, to_params(d), cfg), cfg));
  }, py::arg("params"), py::arg("x0"), py::arg("r2"), py::arg("tol") = py::none());
  m.def("first_return", [](const py::dict& d, double s, py::object tol) {
    return first_return(s, to_params(d), to_cfg(tol));
  }, py::arg("params"), py::arg("s"), py::arg("tol") = py::none());
  m.def("simulate", [](const py::dict& d, std::vector<double> state, double t_max, py::object tol) {
    IntegratorConfig cfg = to_cfg(tol);
    cfg.t_max = t_max;
    if (state.size() == 2) state = {state[0], state[0], state[1]};
    if (state.size() != 3) throw py::value_error("state must be (x, z) or (x, y, z)");
    const Trajectory traj = integrate_filippov({state[0], state[1], state[2]}, cfg, to_params(d));
    py::list arcs;
    for (const Arc& arc : traj.arcs) {
      py::list states;
      for (const State& s : arc.states) states.append(py::make_tuple(s.x, s.y, s.z));
      arcs.append(py::dict(py::arg("kind") = std::string(to_string(arc.kind)), py::arg("t") = arc.t,
                           py::arg("states") = states,
                           py::arg("event") = std::string(to_string(arc.terminal_event.kind))));
    }
    return arcs;
  }, py::arg("params"), py::arg("state"), py::arg("t_max") = 200.0, py::arg("tol") = py::none());
}
