#pragma once

#include <string_view>
#include <vector>

#include "preyswitch/integrator.hpp"
#include "preyswitch/model.hpp"

namespace preyswitch {

enum class ArcKind { SmoothX, SmoothY, Sliding, PlanarLV };
std::string_view to_string(ArcKind kind) noexcept;

enum class EventKind {
  SigmaCrossing,
  SigmaEntrySliding,
  FoldExit,
  FocusCapture,
  DomainExit,
  HorizonReached,
};
std::string_view to_string(EventKind kind) noexcept;

/// Event location. Sliding events are stored in the 3D embedding (x, x, z);
/// planar events carry y = 0.
struct EventRecord {
  EventKind kind = EventKind::HorizonReached;
  double t = 0.0;
  State state;
};

struct Arc {
  ArcKind kind = ArcKind::SmoothX;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> t;
  std::vector<State> states;
  EventRecord terminal_event;

  const State& initial() const { return states.front(); }
  const State& final() const { return states.back(); }
};

struct Trajectory {
  State initial;
  std::vector<Arc> arcs;
};

/// 1% of the linearized period 2 pi / sqrt(m r1) unless cfg.max_step is set.
double effective_max_step(const IntegratorConfig& cfg, const Parameters& params);

/// Integrates one smooth piece until it reaches the switching plane (X, Y),
/// a coordinate plane, or the horizon. For PlanarLV s0.y is ignored.
Arc integrate_smooth(Piece piece, const State& s0, Direction direction, const IntegratorConfig& cfg,
                     const Parameters& params);

constexpr double kDefaultCaptureRadius = 1e-4;

/// Integrates the closed-form sliding field from p0 (z >= phi). Stops on
/// FoldExit (z falls through phi), FocusCapture, DomainExit or the horizon.
Arc integrate_sliding(const SigmaState& p0, Direction direction, const IntegratorConfig& cfg,
                      const Parameters& params, double focus_capture_radius = kDefaultCaptureRadius);

struct FilippovOptions {
  double focus_capture_radius = kDefaultCaptureRadius;
  int chattering_events = 50;     // switching events tolerated ...
  double chattering_window = 10;  // ... within this many event_tol time units
};

/// Forward Filippov trajectory: X above the plane, Y below, sliding on the
/// sliding region, hand-off back to X at visible fold exits.
Trajectory integrate_filippov(const State& s0, const IntegratorConfig& cfg, const Parameters& params,
                              const FilippovOptions& options = {});

struct LvPeriod {
  double period = 0.0;
  SigmaState terminal;  // (x, z) at the located return
};

/// Period of the planar Lotka-Volterra orbit through (x0, r1), 0 < x0 < tau.
LvPeriod lv_period(double x0, const IntegratorConfig& cfg, const Parameters& params);

}  // namespace preyswitch
