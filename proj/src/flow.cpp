#include "preyswitch/flow.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "preyswitch/error.hpp"
#include "preyswitch/sliding.hpp"

namespace preyswitch {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(event_tol > 0.0) || !(t_max > 0.0) ||
      !(blowup_bound > 0.0))
    throw Error(ErrorKind::InvalidConfig, "integrator tolerances and horizon must be positive");
  if (event_tol > abs_tol * 1e2)
    throw Error(ErrorKind::InvalidConfig, "event_tol must not exceed 100 * abs_tol");
}

IntegratorConfig IntegratorConfig::scaled(double factor) const {
  IntegratorConfig out = *this;
  out.rel_tol *= factor;
  out.abs_tol *= factor;
  out.event_tol *= factor;
  return out;
}

std::string_view to_string(ArcKind kind) noexcept {
  switch (kind) {
    case ArcKind::SmoothX: return "SmoothX";
    case ArcKind::SmoothY: return "SmoothY";
    case ArcKind::Sliding: return "Sliding";
    case ArcKind::PlanarLV: return "PlanarLV";
  }
  return "Unknown";
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::SigmaCrossing: return "SigmaCrossing";
    case EventKind::SigmaEntrySliding: return "SigmaEntrySliding";
    case EventKind::FoldExit: return "FoldExit";
    case EventKind::FocusCapture: return "FocusCapture";
    case EventKind::DomainExit: return "DomainExit";
    case EventKind::HorizonReached: return "HorizonReached";
  }
  return "Unknown";
}

double effective_max_step(const IntegratorConfig& cfg, const Parameters& params) {
  if (cfg.max_step > 0.0) return cfg.max_step;
  return 0.01 * 2.0 * std::numbers::pi / std::sqrt(params.m() * params.r1());
}

namespace {

template <std::size_t N>
EventSpec<N> coordinate_exit(std::size_t i) {
  return {[i](const std::array<double, N>& y) { return y[i]; }, Crossing::Falling, {}};
}

void require_domain(const State& s, double tol) {
  if (s.x < -tol || s.y < -tol || s.z < -tol)
    throw Error(ErrorKind::DomainError, "state lies outside the nonnegative octant");
}

}  // namespace

Arc integrate_smooth(Piece piece, const State& s0, Direction direction, const IntegratorConfig& cfg,
                     const Parameters& params) {
  cfg.validate();
  require_domain(s0, cfg.event_tol);
  const double max_step = effective_max_step(cfg, params);
  Arc arc;

  if (piece == Piece::PlanarLV) {
    auto f = [&params](const Vec2& v) { return field_planar(v[0], v[1], params); };
    std::vector<EventSpec<2>> events{coordinate_exit<2>(0), coordinate_exit<2>(1)};
    const auto res = integrate<2>(f, 0.0, Vec2{s0.x, s0.z}, direction, cfg, max_step, events);
    arc.kind = ArcKind::PlanarLV;
    arc.t = res.t;
    arc.states.reserve(res.y.size());
    for (const auto& v : res.y) arc.states.push_back({v[0], 0.0, v[1]});
    arc.terminal_event = {res.event < 0 ? EventKind::HorizonReached : EventKind::DomainExit, res.t_end,
                          {res.y_end[0], 0.0, res.y_end[1]}};
  } else {
    const double h0 = switching_function(s0);
    if (piece == Piece::X && h0 < -cfg.event_tol)
      throw Error(ErrorKind::PreconditionViolation, "X is only defined on h >= 0");
    if (piece == Piece::Y && h0 > cfg.event_tol)
      throw Error(ErrorKind::PreconditionViolation, "Y is only defined on h <= 0");
    std::vector<EventSpec<3>> events{
        {[](const Vec3& v) { return v[0] - v[1]; },
         piece == Piece::X ? Crossing::Falling : Crossing::Rising,
         {}},
        coordinate_exit<3>(0), coordinate_exit<3>(1), coordinate_exit<3>(2)};
    SolveResult<3> res;
    if (piece == Piece::X) {
      auto f = [&params](const Vec3& v) { return field_x(State::from_array(v), params); };
      res = integrate<3>(f, 0.0, s0.to_array(), direction, cfg, max_step, events);
    } else {
      auto f = [&params](const Vec3& v) { return field_y(State::from_array(v), params); };
      res = integrate<3>(f, 0.0, s0.to_array(), direction, cfg, max_step, events);
    }
    arc.kind = piece == Piece::X ? ArcKind::SmoothX : ArcKind::SmoothY;
    arc.t = res.t;
    arc.states.reserve(res.y.size());
    for (const auto& v : res.y) arc.states.push_back(State::from_array(v));
    EventKind kind = EventKind::HorizonReached;
    if (res.event == 0) kind = EventKind::SigmaCrossing;
    else if (res.event > 0) kind = EventKind::DomainExit;
    arc.terminal_event = {kind, res.t_end, State::from_array(res.y_end)};
  }
  arc.t0 = arc.t.front();
  arc.t1 = arc.terminal_event.t;
  return arc;
}

Arc integrate_sliding(const SigmaState& p0, Direction direction, const IntegratorConfig& cfg,
                      const Parameters& params, double focus_capture_radius) {
  cfg.validate();
  const double phi = params.phi();
  if (!(p0.x > 0.0) || p0.z < phi - cfg.event_tol)
    throw Error(ErrorKind::PreconditionViolation, "sliding integration needs x > 0 and z >= phi");
  const SigmaState focus = pseudo_equilibria(params).interior;
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;

  Arc arc;
  arc.kind = ArcKind::Sliding;
  auto immediate = [&](EventKind kind) {
    arc.t = {0.0};
    arc.states = {p0.embed()};
    arc.terminal_event = {kind, 0.0, p0.embed()};
    return arc;
  };

  // On the boundary of the sliding region with the flow pointing out of it.
  // At the cusp the z-rate vanishes and only its rounding error is left.
  const double zrate_floor = kDefaultTangencyTol * params.m() * phi;
  if (p0.z - phi <= cfg.event_tol && sign * eval_sliding(p0, params)[1] < -zrate_floor)
    return immediate(EventKind::FoldExit);
  const double d0 = std::hypot(p0.x - focus.x, p0.z - focus.z);
  if (direction == Direction::Backward && d0 <= focus_capture_radius)
    return immediate(EventKind::FocusCapture);

  auto f = [&params](const Vec2& v) { return eval_sliding({v[0], v[1]}, params); };
  std::vector<EventSpec<2>> events{
      {[phi](const Vec2& v) { return v[1] - phi; }, Crossing::Falling, {}},
      {[focus, focus_capture_radius](const Vec2& v) {
         return std::hypot(v[0] - focus.x, v[1] - focus.z) - focus_capture_radius;
       },
       Crossing::Falling,
       {}},
      coordinate_exit<2>(0),
  };
  const auto res = integrate<2>(f, 0.0, Vec2{p0.x, p0.z}, direction, cfg,
                                effective_max_step(cfg, params), events);
  arc.t = res.t;
  arc.states.reserve(res.y.size());
  for (const auto& v : res.y) arc.states.push_back({v[0], v[0], v[1]});
  EventKind kind = EventKind::HorizonReached;
  switch (res.event) {
    case 0: kind = EventKind::FoldExit; break;
    case 1: kind = EventKind::FocusCapture; break;
    case 2: kind = EventKind::DomainExit; break;
    default: break;
  }
  arc.terminal_event = {kind, res.t_end, {res.y_end[0], res.y_end[0], res.y_end[1]}};
  arc.t0 = arc.t.front();
  arc.t1 = arc.terminal_event.t;
  return arc;
}

namespace {

enum class Mode { X, Y, Slide };

// Which piece governs a state that sits on the switching plane.
Mode mode_on_plane(const SigmaState& p, const Parameters& params) {
  switch (classify_sigma_point(p, params)) {
    case RegionLabel::Sliding:
    case RegionLabel::Cusp:
      return Mode::Slide;
    case RegionLabel::Boundary:
      // fold line beyond the cusp: the sliding field enters the sliding region
      return std::abs(p.z - params.phi()) <= kDefaultTangencyTol ? Mode::Slide : Mode::X;
    case RegionLabel::Crossing:
    case RegionLabel::VisibleFold:
    case RegionLabel::OriginLine:
      return Mode::X;
  }
  return Mode::X;
}

void shift_time(Arc& arc, double offset) {
  for (auto& t : arc.t) t += offset;
  arc.t0 += offset;
  arc.t1 += offset;
  arc.terminal_event.t += offset;
}

}  // namespace

Trajectory integrate_filippov(const State& s0, const IntegratorConfig& cfg, const Parameters& params,
                              const FilippovOptions& options) {
  cfg.validate();
  require_domain(s0, cfg.event_tol);
  Trajectory traj;
  traj.initial = s0;

  State s = s0;
  double t = 0.0;
  std::vector<double> switch_times;
  const double tol = cfg.event_tol;

  auto note_switch = [&](double when) {
    switch_times.push_back(when);
    const double window = options.chattering_window * tol;
    int recent = 0;
    for (auto it = switch_times.rbegin(); it != switch_times.rend() && when - *it <= window; ++it)
      ++recent;
    if (recent > options.chattering_events)
      throw Error(ErrorKind::ChatteringGuard,
                  std::to_string(recent) + " switching events within " + std::to_string(window) +
                      " time units near t = " + std::to_string(when));
  };

  while (t < cfg.t_max) {
    IntegratorConfig remaining = cfg;
    remaining.t_max = cfg.t_max - t;

    const double h = switching_function(s);
    Mode mode;
    if (h > tol) mode = Mode::X;
    else if (h < -tol) mode = Mode::Y;
    else mode = mode_on_plane({0.5 * (s.x + s.y), s.z}, params);

    Arc arc;
    if (mode == Mode::Slide) {
      arc = integrate_sliding({0.5 * (s.x + s.y), s.z}, Direction::Forward, remaining, params,
                              options.focus_capture_radius);
    } else {
      arc = integrate_smooth(mode == Mode::X ? Piece::X : Piece::Y, s, Direction::Forward, remaining,
                             params);
    }
    shift_time(arc, t);
    t = arc.t1;
    State end = arc.terminal_event.state;
    bool stop = false;

    switch (arc.terminal_event.kind) {
      case EventKind::SigmaCrossing: {
        end.x = end.y = 0.5 * (end.x + end.y);
        const Mode next = mode_on_plane({end.x, end.z}, params);
        if (next == Mode::Slide) arc.terminal_event.kind = EventKind::SigmaEntrySliding;
        note_switch(t);
        break;
      }
      case EventKind::FoldExit:
        end.z = params.phi();
        end.y = end.x;
        note_switch(t);
        break;
      default:
        stop = true;
        break;
    }
    arc.terminal_event.state = end;
    arc.states.back() = end;
    traj.arcs.push_back(std::move(arc));
    s = end;
    if (stop) break;
  }
  return traj;
}

LvPeriod lv_period(double x0, const IntegratorConfig& cfg, const Parameters& params) {
  const double tau = params.tau();
  if (!(x0 > 0.0 && x0 < tau))
    throw Error(ErrorKind::PreconditionViolation, "lv_period needs 0 < x0 < tau");
  const double r1 = params.r1();
  auto f = [&params](const Vec2& v) { return field_planar(v[0], v[1], params); };
  std::vector<EventSpec<2>> events{
      {[r1](const Vec2& v) { return v[1] - r1; }, Crossing::Falling,
       [tau](const Vec2& v) { return v[0] < tau; }},
  };
  const auto res = integrate<2>(f, 0.0, Vec2{x0, r1}, Direction::Forward, cfg,
                                effective_max_step(cfg, params), events, false);
  if (res.event != 0)
    throw Error(ErrorKind::NoReturn, "orbit did not return to the section within t_max");
  return {res.t_end, {res.y_end[0], res.y_end[1]}};
}

}  // namespace preyswitch
