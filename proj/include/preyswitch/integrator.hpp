#pragma once

// Dormand-Prince 5(4) with dense output and sign-change events.
//
// Events are armed: a Falling event only fires after g has been seen above
// event_tol, a Rising event only after g has been seen below -event_tol.
// This lets an integration start on an event surface (a tangency or a point
// snapped onto the switching plane) without firing immediately.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "preyswitch/error.hpp"

namespace preyswitch {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double event_tol = 1e-12;
  double max_step = 0.0;  // <= 0 selects 1% of the problem's characteristic time
  double t_max = 2000.0;
  double blowup_bound = 1e8;

  /// Throws InvalidConfig unless all tolerances are positive and
  /// event_tol <= 100 abs_tol.
  void validate() const;

  /// Copy with every tolerance scaled by `factor`.
  IntegratorConfig scaled(double factor) const;
};

enum class Direction { Forward, Backward };

enum class Crossing {
  Falling,  // g goes from > 0 to <= 0
  Rising,   // g goes from < 0 to >= 0
};

template <std::size_t N>
struct EventSpec {
  using Vec = std::array<double, N>;
  std::function<double(const Vec&)> g;
  Crossing crossing = Crossing::Falling;
  /// Optional filter evaluated at a located crossing; rejected crossings
  /// disarm the event and integration continues.
  std::function<bool(const Vec&)> accept;
};

template <std::size_t N>
struct SolveResult {
  using Vec = std::array<double, N>;
  std::vector<double> t;
  std::vector<Vec> y;
  int event = -1;  // index into the event list, -1 when the horizon was reached
  double t_end = 0.0;
  Vec y_end{};
  std::vector<bool> armed;  // arming state at termination
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

namespace detail {

struct Dopri5 {
  static constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
  static constexpr double a21 = 0.2;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

template <std::size_t N>
struct Step {
  using Vec = std::array<double, N>;
  Vec y1{};
  Vec k7{};
  Vec err{};
  std::array<Vec, 5> dense{};
};

template <std::size_t N, class F>
Step<N> dopri_step(const F& f, const std::array<double, N>& y0, const std::array<double, N>& k1,
                   double h) {
  using C = Dopri5;
  using Vec = std::array<double, N>;
  Vec tmp, k2, k3, k4, k5, k6;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y0[i] + h * C::a21 * k1[i];
  k2 = f(tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y0[i] + h * (C::a31 * k1[i] + C::a32 * k2[i]);
  k3 = f(tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y0[i] + h * (C::a41 * k1[i] + C::a42 * k2[i] + C::a43 * k3[i]);
  k4 = f(tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y0[i] + h * (C::a51 * k1[i] + C::a52 * k2[i] + C::a53 * k3[i] + C::a54 * k4[i]);
  k5 = f(tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y0[i] + h * (C::a61 * k1[i] + C::a62 * k2[i] + C::a63 * k3[i] + C::a64 * k4[i] +
                          C::a65 * k5[i]);
  k6 = f(tmp);
  Step<N> s;
  for (std::size_t i = 0; i < N; ++i)
    s.y1[i] = y0[i] + h * (C::b1 * k1[i] + C::b3 * k3[i] + C::b4 * k4[i] + C::b5 * k5[i] +
                           C::b6 * k6[i]);
  s.k7 = f(s.y1);
  for (std::size_t i = 0; i < N; ++i) {
    s.err[i] = h * (C::e1 * k1[i] + C::e3 * k3[i] + C::e4 * k4[i] + C::e5 * k5[i] +
                    C::e6 * k6[i] + C::e7 * s.k7[i]);
    const double dy = s.y1[i] - y0[i];
    const double bspl = h * k1[i] - dy;
    s.dense[0][i] = y0[i];
    s.dense[1][i] = dy;
    s.dense[2][i] = bspl;
    s.dense[3][i] = dy - h * s.k7[i] - bspl;
    s.dense[4][i] = h * (C::d1 * k1[i] + C::d3 * k3[i] + C::d4 * k4[i] + C::d5 * k5[i] +
                         C::d6 * k6[i] + C::d7 * s.k7[i]);
  }
  return s;
}

template <std::size_t N>
std::array<double, N> dense_eval(const Step<N>& s, double theta) {
  const double t1 = 1.0 - theta;
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = s.dense[0][i] +
             theta * (s.dense[1][i] +
                      t1 * (s.dense[2][i] + theta * (s.dense[3][i] + t1 * s.dense[4][i])));
  return out;
}

template <std::size_t N>
double error_norm(const std::array<double, N>& y0, const std::array<double, N>& y1,
                  const std::array<double, N>& err, const IntegratorConfig& cfg) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(N));
}

inline bool on_pre_side(double g, Crossing c, double tol) {
  return c == Crossing::Falling ? g > tol : g < -tol;
}

inline bool past_surface(double g, Crossing c) {
  return c == Crossing::Falling ? g <= 0.0 : g >= 0.0;
}

}  // namespace detail

/// Integrates y' = f(y) from (t0, y0) for at most cfg.t_max time units in the
/// requested direction, stopping at the first accepted event.
template <std::size_t N, class F>
SolveResult<N> integrate(const F& f, double t0, const std::array<double, N>& y0,
                         Direction direction, const IntegratorConfig& cfg, double max_step,
                         const std::vector<EventSpec<N>>& events, bool keep_samples = true) {
  using Vec = std::array<double, N>;
  cfg.validate();
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;
  // Internal time runs forward; the field is negated for backward integration.
  auto rhs = [&](const Vec& y) {
    Vec v = f(y);
    if (sign < 0.0)
      for (auto& c : v) c = -c;
    return v;
  };

  SolveResult<N> out;
  out.armed.assign(events.size(), false);
  for (std::size_t k = 0; k < events.size(); ++k)
    out.armed[k] = detail::on_pre_side(events[k].g(y0), events[k].crossing, cfg.event_tol);

  auto record = [&](double s, const Vec& y) {
    if (keep_samples) {
      out.t.push_back(t0 + sign * s);
      out.y.push_back(y);
    }
  };
  record(0.0, y0);

  Vec y = y0;
  Vec k1 = rhs(y);
  double s = 0.0;

  // Initial step from the first-derivative scale.
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / d1);
    h = std::min({h, max_step, cfg.t_max});
  }

  constexpr int kSubsamples = 8;
  bool last_rejected = false;

  while (s < cfg.t_max) {
    if (s + h > cfg.t_max) h = cfg.t_max - s;
    const double h_floor = 1e-14 * std::max(1.0, std::abs(s));
    if (h < h_floor)
      throw Error(ErrorKind::StepFailure, "step size underflow at t = " + std::to_string(t0 + sign * s));

    const auto step = detail::dopri_step<N>(rhs, y, k1, h);
    const double err = detail::error_norm<N>(y, step.y1, step.err, cfg);
    if (!std::isfinite(err) || err > 1.0) {
      ++out.rejected_steps;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      last_rejected = true;
      continue;
    }
    ++out.accepted_steps;

    // Event detection on dense-output subsamples.
    int hit = -1;
    double hit_time = std::numeric_limits<double>::infinity();
    Vec hit_state{};
    for (std::size_t k = 0; k < events.size(); ++k) {
      const auto& ev = events[k];
      bool armed = out.armed[k];
      double theta_prev = 0.0;
      for (int j = 1; j <= kSubsamples; ++j) {
        const double theta = static_cast<double>(j) / kSubsamples;
        const Vec yj = j == kSubsamples ? step.y1 : detail::dense_eval<N>(step, theta);
        const double gj = ev.g(yj);
        if (armed && detail::past_surface(gj, ev.crossing)) {
          // Bisection with exact sub-steps from the start of this step.
          double lo = theta_prev * h, hi = theta * h;
          double t_best = hi;
          Vec y_best = j == kSubsamples ? step.y1 : detail::dopri_step<N>(rhs, y, k1, hi).y1;
          double g_best = ev.g(y_best);
          for (int it = 0; it < 200 && std::abs(g_best) > cfg.event_tol; ++it) {
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, s + hi)) break;
            const double mid = 0.5 * (lo + hi);
            const Vec ym = detail::dopri_step<N>(rhs, y, k1, mid).y1;
            const double gm = ev.g(ym);
            if (detail::past_surface(gm, ev.crossing)) hi = mid;
            else lo = mid;
            if (std::abs(gm) < std::abs(g_best)) {
              g_best = gm;
              y_best = ym;
              t_best = mid;
            }
          }
          armed = false;
          if (!ev.accept || ev.accept(y_best)) {
            if (s + t_best < hit_time) {
              hit_time = s + t_best;
              hit = static_cast<int>(k);
              hit_state = y_best;
            }
            break;
          }
        } else if (!armed && detail::on_pre_side(gj, ev.crossing, cfg.event_tol)) {
          armed = true;
        }
        theta_prev = theta;
      }
      out.armed[k] = armed;
    }

    if (hit >= 0) {
      out.event = hit;
      out.t_end = t0 + sign * hit_time;
      out.y_end = hit_state;
      if (keep_samples && hit_time > s) record(hit_time, hit_state);
      else if (keep_samples) out.y.back() = hit_state;
      return out;
    }

    s += h;
    y = step.y1;
    k1 = step.k7;
    double norm = 0.0;
    for (double c : y) norm = std::max(norm, std::abs(c));
    if (!(norm <= cfg.blowup_bound))
      throw Error(ErrorKind::BlowUp, "state norm exceeded the blow-up bound at t = " +
                                         std::to_string(t0 + sign * s));
    record(s, y);

    double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
    last_rejected = false;
    h = std::min(h * fac, max_step);
  }

  out.event = -1;
  out.t_end = t0 + sign * s;
  out.y_end = y;
  return out;
}

}  // namespace preyswitch
