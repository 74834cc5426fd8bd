#include "preyswitch/connection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/tools/toms748_solve.hpp>

#include "preyswitch/error.hpp"
#include "preyswitch/sliding.hpp"

namespace preyswitch {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Runs body(i) for i in [0, n) on up to `threads` workers. The exception of
// the lowest failing index is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, const Body& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<std::size_t>(threads, n);
  pool.reserve(count);
  for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool same_x_flow(const RawParameters& a, const RawParameters& b) {
  return a.r1 == b.r1 && a.r2 == b.r2 && a.m == b.m && a.e * a.q1 == b.e * b.q1;
}

}  // namespace

MuPoint mu_point(double x0, const Parameters& params, const IntegratorConfig& cfg) {
  const double tau = params.tau();
  if (!(x0 > 0.0)) throw Error(ErrorKind::DomainError, "fold abscissa must be positive, got " + fmt(x0));
  if (x0 >= tau)
    throw Error(ErrorKind::TangencyAmbiguity,
                "x0 = " + fmt(x0) + " is not a visible fold point (tau = " + fmt(tau) + ")");
  const double phi = params.phi();
  auto f = [&params](const Vec3& v) { return field_x(State::from_array(v), params); };
  const std::vector<EventSpec<3>> events{
      {[](const Vec3& v) { return v[0] - v[1]; }, Crossing::Falling, {}},
  };
  SolveResult<3> res;
  try {
    res = integrate<3>(f, 0.0, Vec3{x0, x0, phi}, Direction::Forward, cfg,
                       effective_max_step(cfg, params), events, false);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::BlowUp) throw;
    throw Error(ErrorKind::NoReturn, "X-orbit from x0 = " + fmt(x0) + " escaped before returning");
  }
  if (res.event != 0) {
    if (!res.armed[0] && res.accepted_steps > 0)
      throw Error(ErrorKind::TangencyAmbiguity, "h never left the switching plane from x0 = " + fmt(x0));
    throw Error(ErrorKind::NoReturn, "no return to the switching plane from x0 = " + fmt(x0));
  }
  MuPoint out;
  out.x0 = x0;
  out.t1 = res.t_end;
  out.u = 0.5 * (res.y_end[0] + res.y_end[1]);
  out.v = res.y_end[2];
  out.consistency_residual = std::abs(out.u - x0 * std::exp(params.r2() * out.t1)) / out.u;
  const double limit = std::max(1e-10, cfg.rel_tol);
  if (out.consistency_residual > limit)
    throw Error(ErrorKind::VerificationFailure,
                "return point disagrees with x0 exp(r2 t1) by " + fmt(out.consistency_residual));
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) out[0] = lo;
  for (std::size_t i = 0; i < n && n > 1; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

MuCurve mu_curve(std::span<const double> grid, const Parameters& params, const IntegratorConfig& cfg,
                 unsigned threads) {
  const double tau = params.tau();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < tau))
      throw Error(ErrorKind::PreconditionViolation, "grid node " + fmt(grid[i]) + " outside (0, tau)");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw Error(ErrorKind::PreconditionViolation, "grid must be strictly increasing");
  }
  MuCurve curve;
  curve.params = params.raw();
  curve.samples.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    try {
      curve.samples[i] = mu_point(grid[i], params, cfg);
    } catch (const Error& err) {
      throw Error(err.kind(), "at x0 = " + fmt(grid[i]) + ": " + err.what());
    }
  });
  return curve;
}

std::optional<WorkingWindow> working_window(const MuCurve& curve, const Parameters& params) {
  const double tau = params.tau();
  const double r1 = params.r1();
  std::optional<WorkingWindow> best;
  std::size_t i = 0;
  const auto& s = curve.samples;
  while (i < s.size()) {
    auto good = [&](std::size_t k) { return s[k].u > 0.0 && s[k].u < tau && s[k].v > r1; };
    if (!good(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < s.size() && good(j + 1)) ++j;
    if (!best || j - i > best->last - best->first) best = WorkingWindow{i, j, s[i].x0, s[j].x0};
    i = j + 1;
  }
  return best;
}

Lemma1Report lemma1_asymptotics_report(const Parameters& params, const IntegratorConfig& cfg) {
  Lemma1Report r;
  const double tau = params.tau();
  const double eps = r.epsilon;
  const MuPoint near = mu_point(tau - eps, params, cfg);
  const MuPoint nearer = mu_point(tau - 0.5 * eps, params, cfg);
  r.u_near = near.u;
  r.u_nearer = nearer.u;
  r.slope = (near.u - nearer.u) / (0.5 * eps);
  r.slope_pass = std::abs(r.slope - 2.0) <= 0.05 * 2.0;
  r.fold_ratio = std::abs(near.v - params.phi()) / eps;
  r.fold_pass = r.fold_ratio <= 0.01;

  RawParameters raw = params.raw();
  raw.r2 = r.small_r2;
  const Parameters small = validate_parameters(raw);
  r.x0 = 0.5 * tau;
  const MuPoint mp = mu_point(r.x0, small, cfg);
  r.period = lv_period(r.x0, cfg, small).period;
  r.u_shift = mp.u - r.x0;
  r.measured_coeff = (mp.v - small.r1()) / std::sqrt(small.r2());
  r.predicted_coeff =
      std::sqrt(2.0 * small.r1() * r.period * (small.m() - small.e() * small.q1() * r.x0));
  r.coeff_rel_error = std::abs(r.measured_coeff - r.predicted_coeff) / r.predicted_coeff;
  r.coeff_pass = r.coeff_rel_error <= 0.02;
  return r;
}

MuCurve bracketing_curve(const Parameters& params, const IntegratorConfig& cfg,
                         const DistanceOptions& options, unsigned threads) {
  const double tau = params.tau();
  const auto grid = linspace(options.grid_lo * tau, options.grid_hi * tau, options.grid_nodes);
  return mu_curve(grid, params, cfg, threads);
}

ConnectionDistance distance_to_connection(const Parameters& params, const IntegratorConfig& cfg,
                                          const DistanceOptions& options) {
  return distance_to_connection(params, bracketing_curve(params, cfg, options), cfg);
}

ConnectionDistance distance_to_connection(const Parameters& params, const MuCurve& curve,
                                          const IntegratorConfig& cfg) {
  if (!same_x_flow(params.raw(), curve.params))
    throw Error(ErrorKind::PreconditionViolation, "mu-curve was computed for a different X flow");
  const auto focus = classify_focus(params);
  if (focus.kind != FocusKind::RepulsiveFocus)
    throw Error(ErrorKind::Lemma2Violation,
                "interior pseudo-equilibrium is " + std::string(to_string(focus.kind)) +
                    " at beta1 = " + fmt(params.beta1()));
  const double xc = focus.location.x;
  const double zc = focus.location.z;

  const auto window = working_window(curve, params);
  if (!window || window->last == window->first)
    throw Error(ErrorKind::NoBracket, "mu-curve has no working window with u < tau and v > r1");
  const auto& s = curve.samples;

  std::vector<std::size_t> brackets;
  for (std::size_t i = window->first; i < window->last; ++i) {
    const double a = s[i].u - xc;
    const double b = s[i + 1].u - xc;
    if (a == 0.0 || (a < 0.0) != (b < 0.0)) brackets.push_back(i);
  }
  if (s[window->last].u == xc) brackets.push_back(window->last);
  if (brackets.empty())
    throw Error(ErrorKind::NoBracket, "x_c = " + fmt(xc) + " outside the range of u on [" +
                                          fmt(window->a) + ", " + fmt(window->b) + "]");
  if (brackets.size() > 1)
    throw Error(ErrorKind::MultipleRoots, std::to_string(brackets.size()) + " crossings of u = x_c");

  const std::size_t i = brackets.front();
  if (s[i].u == xc) {
    return {s[i].v - zc, s[i].x0, s[i], focus.location};
  }
  // Local monotonicity of u around the bracket.
  const std::size_t lo_idx = i > window->first ? i - 1 : i;
  const std::size_t hi_idx = std::min(i + 2, window->last);
  const bool increasing = s[i + 1].u > s[i].u;
  for (std::size_t k = lo_idx; k < hi_idx; ++k) {
    if ((s[k + 1].u > s[k].u) != increasing)
      throw Error(ErrorKind::MultipleRoots, "u is not monotone near x0 = " + fmt(s[i].x0));
  }

  MuPoint best = s[i];
  auto g = [&](double x0) {
    const MuPoint mp = mu_point(x0, params, cfg);
    if (std::abs(mp.u - xc) < std::abs(best.u - xc)) best = mp;
    return mp.u - xc;
  };
  std::uintmax_t max_iter = 200;
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
  const auto root = boost::math::tools::toms748_solve(g, s[i].x0, s[i + 1].x0, s[i].u - xc,
                                                      s[i + 1].u - xc, tol, max_iter);
  const double x0 = 0.5 * (root.first + root.second);
  const MuPoint mp = std::abs(best.x0 - x0) <= std::abs(root.second - root.first) ? best : mu_point(x0, params, cfg);
  return {mp.v - zc, mp.x0, mp, focus.location};
}

bool ConnectionCertificate::backward_ok() const {
  return backward_captured && backward_min_z >= (params.r1 - params.r2) - cfg.event_tol;
}

ConnectionCertificate check_connection(const Parameters& params, double x0, const IntegratorConfig& cfg,
                                       const VerifyOptions& options) {
  const double tau = params.tau();
  if (!(x0 > 0.0 && x0 < tau))
    throw Error(ErrorKind::PreconditionViolation, "fold abscissa " + fmt(x0) + " outside (0, tau)");
  ConnectionCertificate c;
  c.params = params.raw();
  c.cfg = cfg;
  c.beta1_star = params.beta1();
  c.bracket_lo = c.bracket_hi = params.beta1();
  c.x0 = x0;
  c.focus = pseudo_equilibria(params).interior;
  c.forward_tol = options.forward_tol;
  c.capture_radius = options.capture_radius;
  const double phi = params.phi();

  const MuPoint landing = mu_point(x0, params, cfg);
  c.landing = {landing.u, landing.v};
  const double du = landing.u - c.focus.x;
  const double dv = landing.v - c.focus.z;
  c.forward_error = std::sqrt(2.0 * du * du + dv * dv);
  c.residual_D = dv;

  const Arc back = integrate_sliding({x0, phi}, Direction::Backward, cfg, params, options.capture_radius);
  c.backward_captured = back.terminal_event.kind == EventKind::FocusCapture;
  c.backward_time = back.t0 - back.t1;
  c.backward_min_z = std::numeric_limits<double>::infinity();
  for (const auto& st : back.states) c.backward_min_z = std::min(c.backward_min_z, st.z);

  // Forward sliding orbit through the cusp; no capture stop since the focus repels.
  const Arc through_cusp = integrate_sliding({tau, phi}, Direction::Forward, cfg, params, 0.0);
  if (through_cusp.terminal_event.kind == EventKind::FoldExit)
    c.x_star = through_cusp.terminal_event.state.x;

  c.f_level_gap = first_integral_F(x0, phi, params) - first_integral_F(c.focus.x, c.focus.z, params);
  return c;
}

ConnectionCertificate verify_connection(const Parameters& params, double x0, const IntegratorConfig& cfg,
                                        const VerifyOptions& options) {
  ConnectionCertificate c = check_connection(params, x0, cfg, options);
  std::vector<std::string> failed;
  if (!c.backward_ok()) failed.push_back("(j) backward sliding orbit from the fold point was not captured by the focus");
  if (!c.forward_ok())
    failed.push_back("(jj) X-arc lands " + fmt(c.forward_error) + " away from the focus (tolerance " +
                     fmt(c.forward_tol) + ")");
  if (!c.x_star_ok()) failed.push_back("(x*) sliding orbit through the cusp returns at " + fmt(*c.x_star) + " >= x0");
  if (!failed.empty()) {
    std::string msg = failed.front();
    for (std::size_t i = 1; i < failed.size(); ++i) msg += "; " + failed[i];
    throw Error(ErrorKind::VerificationFailure, msg);
  }
  return c;
}

ConnectionCertificate find_shilnikov(const Parameters& fixed, double beta1_lo, double beta1_hi,
                                     const IntegratorConfig& cfg, const FindOptions& options) {
  if (!(beta1_lo < beta1_hi))
    throw Error(ErrorKind::SameSign, "empty beta1 bracket [" + fmt(beta1_lo) + ", " + fmt(beta1_hi) + "]");
  const MuCurve curve = bracketing_curve(fixed, cfg, options.distance);

  auto evaluate = [&](double beta1) {
    const Parameters p = fixed.with_beta1(beta1);
    if (classify_focus(p).kind != FocusKind::RepulsiveFocus)
      throw Error(ErrorKind::Lemma2Violation, "focus is not repulsive at beta1 = " + fmt(beta1));
    return distance_to_connection(p, curve, cfg);
  };

  double lo = beta1_lo, hi = beta1_hi;
  ConnectionDistance d_lo = evaluate(lo);
  ConnectionDistance d_hi = evaluate(hi);
  if (d_lo.D != 0.0 && d_hi.D != 0.0 && (d_lo.D > 0.0) == (d_hi.D > 0.0))
    throw Error(ErrorKind::SameSign, "D(" + fmt(lo) + ") = " + fmt(d_lo.D) + " and D(" + fmt(hi) +
                                         ") = " + fmt(d_hi.D) + " have the same sign");

  int steps = 0;
  std::optional<double> exact;
  if (d_lo.D == 0.0) exact = lo;
  if (d_hi.D == 0.0) exact = hi;
  while (!exact && hi - lo > options.bracket_tol) {
    const double mid = 0.5 * (lo + hi);
    const ConnectionDistance d_mid = evaluate(mid);
    ++steps;
    if (std::abs(d_mid.D) <= options.residual_tol) {
      exact = mid;
      break;
    }
    if ((d_mid.D > 0.0) == (d_lo.D > 0.0)) {
      lo = mid;
      d_lo = d_mid;
    } else {
      hi = mid;
      d_hi = d_mid;
    }
  }

  double star;
  if (exact) {
    star = *exact;
  } else {
    star = lo - d_lo.D * (hi - lo) / (d_hi.D - d_lo.D);
    star = std::clamp(star, lo, hi);
  }
  const ConnectionDistance d_star = evaluate(star);
  ConnectionCertificate cert = verify_connection(fixed.with_beta1(star), d_star.x0, cfg, options.verify);
  cert.beta1_star = star;
  cert.bracket_lo = exact ? star : lo;
  cert.bracket_hi = exact ? star : hi;
  cert.bisection_steps = steps;
  cert.residual_D = d_star.D;
  return cert;
}

std::vector<SweepPoint> sweep_distance(const Parameters& fixed, std::span<const double> beta1_grid,
                                       const IntegratorConfig& cfg, unsigned threads,
                                       const DistanceOptions& options) {
  const MuCurve curve = bracketing_curve(fixed, cfg, options, threads);
  std::vector<SweepPoint> out(beta1_grid.size());
  parallel_for(beta1_grid.size(), threads, [&](std::size_t i) {
    SweepPoint& pt = out[i];
    pt.beta1 = beta1_grid[i];
    try {
      const auto d = distance_to_connection(fixed.with_beta1(pt.beta1), curve, cfg);
      pt.D = d.D;
      pt.x0 = d.x0;
    } catch (const Error& err) {
      pt.D = std::numeric_limits<double>::quiet_NaN();
      pt.x0 = std::numeric_limits<double>::quiet_NaN();
      pt.error = std::string(to_string(err.kind()));
    }
  });
  return out;
}

NPointReport n_point_identities(double x0, double r2, const Parameters& base, const IntegratorConfig& cfg) {
  const double tau = base.tau();
  if (!(x0 > 0.0 && x0 < tau))
    throw Error(ErrorKind::PreconditionViolation, "x0 = " + fmt(x0) + " outside (0, tau)");
  if (!(r2 > 0.0 && r2 < base.r1()))
    throw Error(ErrorKind::PreconditionViolation, "r2 must lie in (0, r1)");
  RawParameters raw = base.raw();
  raw.r2 = r2;
  const Parameters with_r2 = validate_parameters(raw);
  const MuPoint mp = mu_point(x0, with_r2, cfg);
  const double u = mp.u;
  const double v = mp.v;
  const double r1 = raw.r1;
  const double lift = v - r1;
  if (!(lift > 0.0))
    throw Error(ErrorKind::IdentityInfeasible, "v(x0) = " + fmt(v) + " does not exceed r1");

  const double k = raw.e * raw.q1;  // fixed: keeps the X flow, hence mu, unchanged
  if (!(raw.q2 > 0.0)) throw Error(ErrorKind::IdentityInfeasible, "q2 = 0 leaves e undetermined");
  const double e = raw.a_q * (raw.m * v - k * r1 * u) / (raw.q2 * lift * u);
  if (!(e > 0.0)) throw Error(ErrorKind::IdentityInfeasible, "identity gives e = " + fmt(e));
  RawParameters out_raw = raw;
  out_raw.e = e;
  out_raw.q1 = k / e;
  out_raw.beta2 = r2 * raw.beta1 / lift;
  if (out_raw.q2 - out_raw.a_q * out_raw.q1 < 0.0)
    throw Error(ErrorKind::IdentityInfeasible, "identity forces b_q < 0");
  Parameters out_params = [&] {
    try {
      return validate_parameters(out_raw);
    } catch (const Error& err) {
      throw Error(ErrorKind::IdentityInfeasible, err.what());
    }
  }();

  NPointReport rep;
  rep.params_out = out_raw;
  rep.x0 = x0;
  rep.r2 = r2;
  rep.u = u;
  rep.v = v;
  rep.M_bound = focus_mass_bound_via_height(v, out_params);
  const double big_e = out_raw.a_q * out_raw.m * v /
                       ((out_raw.a_q * out_raw.q1 * r1 + out_raw.q2 * lift) * u);
  const double big_b = r2 * out_raw.beta1 / lift;
  rep.e_residual = out_raw.e - big_e;
  rep.beta2_residual = out_raw.beta2 - big_b;
  const SigmaState eq = pseudo_equilibria(out_params).interior;
  rep.equilibrium_residual = std::hypot(eq.x - u, eq.z - v);
  return rep;
}

NPointReport build_N_point(double x0, double r2, const Parameters& base, const IntegratorConfig& cfg) {
  const NPointReport rep = n_point_identities(x0, r2, base, cfg);
  const RawParameters& out_raw = rep.params_out;
  if (!(out_raw.m < rep.M_bound))
    throw Error(ErrorKind::InequalityViolated,
                "m = " + fmt(out_raw.m) + " is not below M(x0, r2) = " + fmt(rep.M_bound));
  if (rep.equilibrium_residual > 1e-8)
    throw Error(ErrorKind::VerificationFailure,
                "pseudo-equilibrium misses (u, v) by " + fmt(rep.equilibrium_residual));
  return rep;
}

double first_return(double s, const Parameters& params, const IntegratorConfig& cfg) {
  const MuPoint mp = mu_point(s, params, cfg);
  if (classify_sigma_point({mp.u, mp.v}, params) != RegionLabel::Sliding)
    throw Error(ErrorKind::OrbitEscaped, "X-orbit from s = " + fmt(s) + " does not land in the sliding region");
  const Arc arc = integrate_sliding({mp.u, mp.v}, Direction::Forward, cfg, params, 0.0);
  if (arc.terminal_event.kind != EventKind::FoldExit)
    throw Error(ErrorKind::OrbitEscaped, "sliding orbit from s = " + fmt(s) + " ended with " +
                                             std::string(to_string(arc.terminal_event.kind)));
  return arc.terminal_event.state.x;
}

std::vector<ReturnMapSample> return_map_sample(const Parameters& params, double x_lo, double x_hi,
                                               std::size_t n, const IntegratorConfig& cfg) {
  if (n == 0) return {};
  const double tau = params.tau();
  if (!(x_lo > 0.0 && x_hi < tau && x_lo <= x_hi))
    throw Error(ErrorKind::PreconditionViolation, "segment must lie in (0, tau)");
  std::vector<ReturnMapSample> out;
  out.reserve(n);
  for (double s : linspace(x_lo, x_hi, n)) out.push_back({s, first_return(s, params, cfg)});
  return out;
}

std::vector<std::size_t> sign_changes(std::span<const ReturnMapSample> samples) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double a = samples[i].pi_s - samples[i].s;
    const double b = samples[i + 1].pi_s - samples[i + 1].s;
    if (a == 0.0 || (a < 0.0) != (b < 0.0)) out.push_back(i);
  }
  return out;
}

FixedPointSearch locate_fixed_point(const Parameters& params, double lo, double hi,
                                    const IntegratorConfig& cfg, int iterations) {
  double g_lo = first_return(lo, params, cfg) - lo;
  const double g_hi = first_return(hi, params, cfg) - hi;
  if (g_lo != 0.0 && g_hi != 0.0 && (g_lo < 0.0) == (g_hi < 0.0))
    throw Error(ErrorKind::SameSign, "pi(s) - s does not change sign on the bracket");
  FixedPointSearch out;
  if (g_lo == 0.0) return {lo, 0.0, true};
  double mid = 0.5 * (lo + hi);
  double g_mid = first_return(mid, params, cfg) - mid;
  for (int it = 0; it < iterations && g_mid != 0.0; ++it) {
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    g_mid = first_return(mid, params, cfg) - mid;
  }
  out.s = mid;
  out.residual = g_mid;
  out.continuous = std::abs(g_mid) <= 1e-6;
  return out;
}

}  // namespace preyswitch
