#include "preyswitch/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "preyswitch/error.hpp"

namespace preyswitch {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

constexpr const char* kKeys[] = {"r1", "r2", "a_q", "q1", "q2", "beta1", "beta2", "m", "e"};

double* field_of(RawParameters& raw, std::string_view key) {
  if (key == "r1") return &raw.r1;
  if (key == "r2") return &raw.r2;
  if (key == "a_q") return &raw.a_q;
  if (key == "q1") return &raw.q1;
  if (key == "q2") return &raw.q2;
  if (key == "beta1") return &raw.beta1;
  if (key == "beta2") return &raw.beta2;
  if (key == "m") return &raw.m;
  if (key == "e") return &raw.e;
  return nullptr;
}

ordered_json params_obj(const RawParameters& raw) {
  ordered_json j = ordered_json::object();
  RawParameters copy = raw;
  for (const char* k : kKeys) j[k] = *field_of(copy, k);
  return j;
}

ordered_json cfg_obj(const IntegratorConfig& cfg) {
  return {{"rel_tol", cfg.rel_tol},     {"abs_tol", cfg.abs_tol},  {"event_tol", cfg.event_tol},
          {"max_step", cfg.max_step},   {"t_max", cfg.t_max},      {"blowup_bound", cfg.blowup_bound}};
}

ordered_json pair(double x, double z) { return {{"x", x}, {"z", z}}; }

}  // namespace

RawParameters parse_raw_parameters(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& err) {
    throw Error(ErrorKind::InvalidConfig, std::string("parameters file is not JSON: ") + err.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "parameters must be a JSON object");
  if (auto nested = j.find("params"); nested != j.end() && nested->is_object()) j = ordered_json(*nested);
  RawParameters raw;
  for (const char* k : kKeys) {
    auto it = j.find(k);
    if (it == j.end()) throw Error(ErrorKind::InvalidConfig, std::string("missing parameter '") + k + "'");
    if (!it->is_number()) throw Error(ErrorKind::InvalidConfig, std::string("parameter '") + k + "' is not a number");
    *field_of(raw, k) = it->get<double>();
  }
  return raw;
}

RawParameters load_raw_parameters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_raw_parameters(ss.str());
}

std::string raw_parameters_json(const RawParameters& raw) { return params_obj(raw).dump(2) + "\n"; }

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,y,z,arc_kind,arc_index\n";
  for (std::size_t k = 0; k < traj.arcs.size(); ++k) {
    const Arc& arc = traj.arcs[k];
    for (std::size_t i = 0; i < arc.t.size(); ++i) {
      const State& s = arc.states[i];
      os << format_double(arc.t[i]) << ',' << format_double(s.x) << ',' << format_double(s.y) << ','
         << format_double(s.z) << ',' << to_string(arc.kind) << ',' << k << '\n';
    }
  }
}

std::string trajectory_events_json(const Trajectory& traj) {
  ordered_json arr = ordered_json::array();
  for (const Arc& arc : traj.arcs) {
    const EventRecord& ev = arc.terminal_event;
    arr.push_back({{"kind", std::string(to_string(ev.kind))},
                   {"t", ev.t},
                   {"state", {ev.state.x, ev.state.y, ev.state.z}}});
  }
  return arr.dump(2) + "\n";
}

void write_mu_curve_csv(std::ostream& os, const MuCurve& curve) {
  os << "x0,u,v\n";
  for (const MuPoint& p : curve.samples)
    os << format_double(p.x0) << ',' << format_double(p.u) << ',' << format_double(p.v) << '\n';
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
  os << "beta1,D,x0,error\n";
  for (const SweepPoint& p : points)
    os << format_double(p.beta1) << ',' << format_double(p.D) << ',' << format_double(p.x0) << ','
       << p.error << '\n';
}

void write_return_map_csv(std::ostream& os, std::span<const ReturnMapSample> samples) {
  os << "s,pi_s\n";
  for (const ReturnMapSample& p : samples) os << format_double(p.s) << ',' << format_double(p.pi_s) << '\n';
}

std::string mu_curve_json(const MuCurve& curve) {
  ordered_json arr = ordered_json::array();
  for (const MuPoint& p : curve.samples) arr.push_back({{"x0", p.x0}, {"u", p.u}, {"v", p.v}});
  return ordered_json{{"samples", arr}, {"params", params_obj(curve.params)}}.dump(2) + "\n";
}

std::string sweep_json(std::span<const SweepPoint> points) {
  ordered_json arr = ordered_json::array();
  for (const SweepPoint& p : points) {
    ordered_json row{{"beta1", p.beta1}};
    if (p.error.empty()) {
      row["D"] = p.D;
      row["x0"] = p.x0;
    } else {
      row["error"] = p.error;
    }
    arr.push_back(row);
  }
  return arr.dump(2) + "\n";
}

std::string return_map_json(std::span<const ReturnMapSample> samples) {
  ordered_json arr = ordered_json::array();
  for (const ReturnMapSample& p : samples) arr.push_back({{"s", p.s}, {"pi_s", p.pi_s}});
  return arr.dump(2) + "\n";
}

std::string certificate_json(const ConnectionCertificate& c) {
  ordered_json j;
  j["beta1_star"] = c.beta1_star;
  j["bracket"] = {c.bracket_lo, c.bracket_hi};
  j["bisection_steps"] = c.bisection_steps;
  j["x0"] = c.x0;
  j["focus"] = pair(c.focus.x, c.focus.z);
  j["landing"] = pair(c.landing.x, c.landing.z);
  j["forward_error"] = c.forward_error;
  j["forward_tol"] = c.forward_tol;
  j["backward_captured"] = c.backward_captured;
  j["capture_radius"] = c.capture_radius;
  j["backward_min_z"] = c.backward_min_z;
  j["backward_time"] = c.backward_time;
  j["x_star"] = c.x_star ? ordered_json(*c.x_star) : ordered_json(nullptr);
  j["residual_D"] = c.residual_D;
  j["f_level_gap"] = c.f_level_gap;
  j["checks"] = {{"backward", c.backward_ok()}, {"forward", c.forward_ok()}, {"x_star", c.x_star_ok()}};
  j["params"] = params_obj(c.params);
  j["cfg"] = cfg_obj(c.cfg);
  return j.dump(2) + "\n";
}

std::string n_point_json(const NPointReport& r, const IntegratorConfig& cfg) {
  ordered_json j;
  j["x0"] = r.x0;
  j["r2"] = r.r2;
  j["u"] = r.u;
  j["v"] = r.v;
  j["M_bound"] = r.M_bound;
  j["identity_residuals"] = {{"e", r.e_residual}, {"beta2", r.beta2_residual}};
  j["equilibrium_residual"] = r.equilibrium_residual;
  j["params"] = params_obj(r.params_out);
  j["cfg"] = cfg_obj(cfg);
  return j.dump(2) + "\n";
}

std::string lemma1_json(const Lemma1Report& r) {
  ordered_json j;
  j["fold"] = {{"epsilon", r.epsilon},       {"u_near", r.u_near},       {"u_nearer", r.u_nearer},
               {"slope", r.slope},           {"slope_pass", r.slope_pass}, {"ratio", r.fold_ratio},
               {"ratio_pass", r.fold_pass}};
  j["small_r2"] = {{"r2", r.small_r2},
                   {"x0", r.x0},
                   {"period", r.period},
                   {"u_shift", r.u_shift},
                   {"measured", r.measured_coeff},
                   {"predicted", r.predicted_coeff},
                   {"rel_error", r.coeff_rel_error},
                   {"pass", r.coeff_pass}};
  j["all_pass"] = r.all_pass();
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace preyswitch
