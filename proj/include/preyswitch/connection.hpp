#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "preyswitch/flow.hpp"
#include "preyswitch/model.hpp"

namespace preyswitch {

/// First transversal return to the switching plane of the X-orbit launched
/// tangentially from the fold point (x0, x0, phi).
struct MuPoint {
  double x0 = 0.0;
  double u = 0.0;
  double v = 0.0;
  double t1 = 0.0;                    // return time
  double consistency_residual = 0.0;  // |u - x0 exp(r2 t1)| / u
};

/// Throws TangencyAmbiguity for x0 >= tau, DomainError for x0 <= 0,
/// NoReturn when the orbit does not come back within the horizon.
MuPoint mu_point(double x0, const Parameters& params, const IntegratorConfig& cfg);

struct MuCurve {
  std::vector<MuPoint> samples;
  RawParameters params;
};

/// mu_point over a sorted grid in (0, tau). Nodes are evaluated on up to
/// `threads` worker threads; any node failure aborts the whole curve.
MuCurve mu_curve(std::span<const double> grid, const Parameters& params, const IntegratorConfig& cfg,
                 unsigned threads = 1);

/// Uniform grid of n nodes on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Longest run of consecutive samples with 0 < u < tau and v > r1.
struct WorkingWindow {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
  double a = 0.0;
  double b = 0.0;
};

std::optional<WorkingWindow> working_window(const MuCurve& curve, const Parameters& params);

struct Lemma1Report {
  double epsilon = 1e-3;
  double u_near = 0.0;       // u(tau - eps)
  double u_nearer = 0.0;     // u(tau - eps/2)
  double slope = 0.0;        // du/d(eps), expected 2
  bool slope_pass = false;   // within 5%
  double fold_ratio = 0.0;   // |v(tau - eps) - phi| / eps
  bool fold_pass = false;    // <= 0.01
  double small_r2 = 1e-4;
  double x0 = 0.0;           // 0.5 tau
  double period = 0.0;       // planar period through (x0, r1)
  double u_shift = 0.0;      // u(x0) - x0 at small r2
  double measured_coeff = 0.0;   // (v - r1) / sqrt(r2)
  double predicted_coeff = 0.0;  // sqrt(2 r1 T (m - e q1 x0))
  double coeff_rel_error = 0.0;
  bool coeff_pass = false;   // within 2%

  bool all_pass() const { return slope_pass && fold_pass && coeff_pass; }
};

Lemma1Report lemma1_asymptotics_report(const Parameters& params, const IntegratorConfig& cfg);

struct DistanceOptions {
  std::size_t grid_nodes = 64;
  double grid_lo = 0.02;  // as fractions of tau
  double grid_hi = 0.98;
};

struct ConnectionDistance {
  double D = 0.0;   // v(x0) - z_c; positive when the focus is below the curve
  double x0 = 0.0;  // fold abscissa with u(x0) = x_c
  MuPoint landing;
  SigmaState focus;
};

/// Sampled mu-curve used to bracket u(x0) = x_c. The curve is independent of
/// beta1 and beta2, so one curve serves a whole beta1 scan.
MuCurve bracketing_curve(const Parameters& params, const IntegratorConfig& cfg,
                         const DistanceOptions& options = {}, unsigned threads = 1);

/// Throws Lemma2Violation unless the focus is repulsive, NoBracket when x_c
/// is outside the range of u on the working window, MultipleRoots when the
/// matching is ambiguous.
ConnectionDistance distance_to_connection(const Parameters& params, const IntegratorConfig& cfg,
                                          const DistanceOptions& options = {});
ConnectionDistance distance_to_connection(const Parameters& params, const MuCurve& curve,
                                          const IntegratorConfig& cfg);

struct ConnectionCertificate {
  RawParameters params;
  IntegratorConfig cfg;
  double beta1_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int bisection_steps = 0;
  double x0 = 0.0;
  SigmaState focus;
  SigmaState landing;               // (u, v) of the X-arc from the fold point
  double forward_error = 0.0;       // distance of the landing from the focus (3D)
  double forward_tol = 1e-6;
  bool backward_captured = false;
  double capture_radius = kDefaultCaptureRadius;
  double backward_min_z = 0.0;      // lowest z on the backward sliding orbit
  double backward_time = 0.0;
  std::optional<double> x_star;     // return of the sliding orbit through (tau, phi)
  double residual_D = 0.0;
  double f_level_gap = 0.0;         // F(x0, phi) - F(x_c, z_c)

  bool forward_ok() const { return forward_error <= forward_tol; }
  bool backward_ok() const;
  bool x_star_ok() const { return !x_star || *x_star < x0; }
  bool all_ok() const { return forward_ok() && backward_ok() && x_star_ok(); }
};

struct VerifyOptions {
  double capture_radius = kDefaultCaptureRadius;
  double forward_tol = 1e-6;
};

/// Runs the three loop checks without throwing on a failed check.
/// Throws PreconditionViolation for x0 outside (0, tau).
ConnectionCertificate check_connection(const Parameters& params, double x0, const IntegratorConfig& cfg,
                                       const VerifyOptions& options = {});

/// check_connection, throwing VerificationFailure naming the first failed check.
ConnectionCertificate verify_connection(const Parameters& params, double x0, const IntegratorConfig& cfg,
                                        const VerifyOptions& options = {});

struct FindOptions {
  double bracket_tol = 1e-6;
  double residual_tol = 1e-9;
  DistanceOptions distance;
  VerifyOptions verify;
};

/// Bisection over beta1 (every other parameter taken from `fixed`) for the
/// value at which the focus sits on the mu-curve. The final estimate is the
/// secant point of the last bracket.
ConnectionCertificate find_shilnikov(const Parameters& fixed, double beta1_lo, double beta1_hi,
                                     const IntegratorConfig& cfg, const FindOptions& options = {});

struct SweepPoint {
  double beta1 = 0.0;
  double D = 0.0;
  double x0 = 0.0;
  std::string error;  // empty on success, error kind otherwise
};

/// distance_to_connection over a beta1 grid, evaluated concurrently. The
/// output order follows the input grid.
std::vector<SweepPoint> sweep_distance(const Parameters& fixed, std::span<const double> beta1_grid,
                                       const IntegratorConfig& cfg, unsigned threads,
                                       const DistanceOptions& options = {});

struct NPointReport {
  RawParameters params_out;
  double x0 = 0.0;
  double r2 = 0.0;
  double u = 0.0;
  double v = 0.0;
  double M_bound = 0.0;
  double e_residual = 0.0;      // e - E(x0)
  double beta2_residual = 0.0;  // beta2 - B(x0)
  double equilibrium_residual = 0.0;
};

/// Solves the equilibrium identities for beta2 and e at x0 (holding e q1
/// fixed so the X flow is unchanged). Feasibility of the identities is
/// checked here; the focus inequality and the equilibrium match are not.
NPointReport n_point_identities(double x0, double r2, const Parameters& base, const IntegratorConfig& cfg);

/// n_point_identities plus the checks: m < M(x0, r2) and the emitted
/// pseudo-equilibrium sitting on (u, v).
NPointReport build_N_point(double x0, double r2, const Parameters& base, const IntegratorConfig& cfg);

struct ReturnMapSample {
  double s = 0.0;
  double pi_s = 0.0;
};

/// Fold-line abscissa where the Filippov orbit from (s, s, phi) next leaves
/// the sliding region. Throws OrbitEscaped if it does not.
double first_return(double s, const Parameters& params, const IntegratorConfig& cfg);

std::vector<ReturnMapSample> return_map_sample(const Parameters& params, double x_lo, double x_hi,
                                               std::size_t n, const IntegratorConfig& cfg);

/// Indices i with pi(s) - s changing sign between samples i and i+1.
std::vector<std::size_t> sign_changes(std::span<const ReturnMapSample> samples);

struct FixedPointSearch {
  double s = 0.0;
  double residual = 0.0;   // pi(s) - s at the bracket midpoint
  bool continuous = false; // residual shrank to ~0, i.e. not a jump of pi
};

/// Bisection on pi(s) - s over a bracket with a sign change.
FixedPointSearch locate_fixed_point(const Parameters& params, double lo, double hi,
                                    const IntegratorConfig& cfg, int iterations = 48);

}  // namespace preyswitch
