// Acceptance run: one PASS/FAIL line per criterion; exit status counts failures.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>

#include "preyswitch/connection.hpp"
#include "preyswitch/error.hpp"
#include "preyswitch/sliding.hpp"
#include "support.hpp"

using namespace preyswitch;
using namespace testing_support;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Runs one criterion; an escaping library error counts as a failure.
void criterion(int id, const char* title, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("threw ") + e.what());
  }
}

}  // namespace

int main() {
  const IntegratorConfig cfg;
  const Parameters base = reference_params(0.994);
  ConnectionCertificate cert;
  bool have_cert = false;

  criterion(1, "beta1 bracket and bisection", [&] {
    const auto start = std::chrono::steady_clock::now();
    const double d_lo = distance_to_connection(base, cfg).D;
    const double d_hi = distance_to_connection(base.with_beta1(10.0), cfg).D;
    cert = find_shilnikov(base, 0.994, 10.0, cfg);
    have_cert = true;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const ConnectionCertificate half = find_shilnikov(base, 0.994, 10.0, cfg.scaled(0.5));
    const double width = cert.bracket_hi - cert.bracket_lo;
    const double agree = std::abs(half.beta1_star - cert.beta1_star);
    const bool ok = (d_lo > 0) != (d_hi > 0) && cert.beta1_star > 0.994 && cert.beta1_star < 10 &&
                    width <= 1e-6 && seconds <= 60 && agree <= 1e-5;
    report(1, "beta1 bracket and bisection", ok,
           fmt("D(0.994)=%+.6f D(10)=%+.6f beta1*=%.10f width=%.2e", d_lo, d_hi, cert.beta1_star, width) +
               fmt(" runtime=%.2fs halved-tol diff=%.2e", seconds, agree));
  });

  criterion(2, "connection certificate", [&] {
    if (!have_cert) throw Error(ErrorKind::VerificationFailure, "no certificate from criterion 1");
    const ConnectionCertificate c = check_connection(base.with_beta1(cert.beta1_star), cert.x0, cfg, {1e-4, 1e-6});
    const bool ok = c.forward_error <= 1e-6 && c.backward_captured && c.backward_min_z >= base.phi() - 1e-12 &&
                    c.x_star_ok();
    report(2, "connection certificate", ok,
           fmt("forward_error=%.2e captured=%g min_z-phi=%.2e x*=%.6f", c.forward_error, c.backward_captured,
               c.backward_min_z - base.phi(), c.x_star.value_or(NAN)) +
               fmt(" x0=%.6f", c.x0));
  });

  Lemma1Report lemma;
  bool have_lemma = false;
  criterion(3, "fold return near the cusp", [&] {
    lemma = lemma1_asymptotics_report(base, cfg);
    have_lemma = true;
    report(3, "fold return near the cusp", lemma.slope_pass && lemma.fold_pass,
           fmt("slope=%.6f (target 2, 5%%) ratio=%.3e (<= 0.01)", lemma.slope, lemma.fold_ratio));
  });

  criterion(4, "small-r2 fold return", [&] {
    if (!have_lemma) lemma = lemma1_asymptotics_report(base, cfg);
    report(4, "small-r2 fold return", lemma.coeff_pass,
           fmt("measured=%.6f predicted=%.6f rel_err=%.3e T=%.6f", lemma.measured_coeff, lemma.predicted_coeff,
               lemma.coeff_rel_error, lemma.period));
  });

  criterion(5, "focus eigenstructure", [&] {
    Rng rng(20240605);
    int draws = 0, mismatches = 0;
    double worst = 0;
    for (int tries = 0; draws < 100 && tries < 100000; ++tries) {
      const RawParameters raw = random_raw(rng);
      const Parameters p = validate_parameters(raw);
      const PseudoEquilibrium f = classify_focus(p);
      const bool cond = raw.m < oracle_mass_bound(raw);
      if (cond != (f.discriminant < 0)) ++mismatches;
      if (!cond) continue;
      ++draws;
      const Mat2 j = sliding_jacobian(f.location, p);
      const double tr = j[0][0] + j[1][1];
      const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
      const std::complex<double> ev = 0.5 * (tr + std::sqrt(std::complex<double>(tr * tr - 4 * det)));
      worst = std::max(worst, std::abs(f.alpha - ev.real()) / std::abs(ev.real()));
    }
    report(5, "focus eigenstructure", draws == 100 && worst <= 1e-8 && mismatches == 0,
           fmt("draws=%g worst_rel=%.2e condition/discriminant mismatches=%g", draws, worst, mismatches));
  });

  criterion(6, "planar conservation and period", [&] {
    const double x0 = 0.5 * base.tau();
    const LvPeriod lv = lv_period(x0, cfg, base);
    IntegratorConfig turn = cfg;
    turn.t_max = lv.period;
    const Arc arc = integrate_smooth(Piece::PlanarLV, {x0, 0.0, base.r1()}, Direction::Forward, turn, base);
    const double f0 = first_integral_F(x0, base.r1(), base);
    double drift = 0;
    for (const State& s : arc.states) drift = std::max(drift, std::abs(first_integral_F(s.x, s.z, base) - f0));
    const double linear = 2 * M_PI / std::sqrt(base.m() * base.r1());
    const double near = lv_period(base.tau() * (1 - 1e-3), cfg, base).period;
    const double rel = std::abs(near - linear) / linear;
    report(6, "planar conservation and period", drift <= 1e-8 && rel <= 0.01,
           fmt("F drift=%.2e T(near tau)=%.6f linear=%.6f rel=%.2e", drift, near, linear, rel));
  });

  criterion(7, "sliding formula equivalence", [&] {
    Rng rng(77);
    double worst = 0, worst_fold = 0;
    for (int i = 0; i < 1000; ++i) {
      const Parameters p = validate_parameters(random_raw(rng));
      const double x = rng.uniform(0.01, 2 * p.tau());
      const double z = p.phi() + rng.uniform(1e-3, 3.0);
      const Vec2 a = eval_sliding({x, z}, p);
      const Vec2 b = eval_sliding({x, z}, p, SlidingMode::GenericFilippov);
      const double scale = std::max(std::abs(a[0]), std::abs(a[1]));
      worst = std::max(worst, std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])) / scale);
      const Vec2 f = eval_sliding({x, p.phi()}, p);
      const auto xf = oracle_x(p.raw(), {x, x, p.phi()});
      worst_fold = std::max({worst_fold, std::abs(f[0] - xf[0]) / std::max(1.0, std::abs(xf[0])),
                             std::abs(f[1] - xf[2]) / std::max(1.0, std::abs(xf[2]))});
    }
    report(7, "sliding formula equivalence", worst <= 1e-12 && worst_fold <= 1e-14,
           fmt("worst_rel=%.2e fold_worst=%.2e", worst, worst_fold));
  });

  criterion(8, "switching-plane classification", [&] {
    Rng rng(88);
    int disagreements = 0, escaping = 0;
    for (int i = 0; i < 10000; ++i) {
      const RawParameters raw = random_raw(rng);
      const Parameters p = validate_parameters(raw);
      const double x = rng.uniform(0.0, 2 * p.tau());
      const double z = rng.uniform(0.0, 2 * p.phi());
      const SignRegion truth = sign_region(raw, x, z);
      const RegionLabel label = classify_sigma_point({x, z}, p);
      if (truth == SignRegion::Escaping) ++escaping;
      if (truth == SignRegion::Sliding && label != RegionLabel::Sliding) ++disagreements;
      if (truth == SignRegion::Crossing && label != RegionLabel::Crossing) ++disagreements;
    }
    report(8, "switching-plane classification", disagreements == 0 && escaping == 0,
           fmt("samples=10000 disagreements=%g escaping=%g", disagreements, escaping));
  });

  criterion(9, "monotonicity witnesses", [&] {
    Rng rng(99);
    int bad_sign = 0;
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const RawParameters raw = random_raw(rng);
      const Parameters p = validate_parameters(raw);
      const double zc = pseudo_equilibria(p).interior.z;
      const double x = rng.uniform(0.05, 2.0);
      double z = rng.uniform(0.05, 4.0);
      if (std::abs(z - zc) < 0.05) z += 0.1;
      const MonotonicityWitnesses w = monotonicity_witnesses({x, z}, p);
      if (!(w.dulac_div > 0) || !(w.dh_along_flow > 0)) ++bad_sign;
      if (std::abs(monotonicity_witnesses({x, zc}, p).dh_along_flow) > 1e-12) ++bad_sign;
      const Vec2 v = eval_sliding({x, z}, p);
      const double fd = oracle_dh(raw, x, z, v[0], v[1]);
      worst = std::max(worst, std::abs(fd - w.dh_along_flow) / std::abs(w.dh_along_flow));
    }
    report(9, "monotonicity witnesses", bad_sign == 0 && worst <= 1e-6,
           fmt("sign violations=%g worst_fd_rel=%.2e", bad_sign, worst));
  });

  criterion(10, "return-map fixed point", [&] {
    if (!have_cert) throw Error(ErrorKind::VerificationFailure, "no certificate from criterion 1");
    const Parameters p = base.with_beta1(cert.beta1_star);
    const auto coarse = return_map_sample(p, cert.x0 - 0.05, cert.x0 + 0.05, 21, cfg);
    const auto fine = return_map_sample(p, cert.x0 - 0.05, cert.x0 + 0.05, 41, cfg);
    int persistent = 0;
    double where = NAN;
    for (std::size_t i : sign_changes(coarse)) {
      for (std::size_t j : sign_changes(fine)) {
        if (fine[j].s >= coarse[i].s && fine[j + 1].s <= coarse[i + 1].s) {
          ++persistent;
          where = 0.5 * (coarse[i].s + coarse[i + 1].s);
          break;
        }
      }
    }
    report(10, "return-map fixed point", persistent >= 1,
           fmt("persistent sign changes=%g (e.g. near s=%.5f) on [x0-0.05, x0+0.05]", persistent, where));
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
