#pragma once

// Shared fixtures and independent oracles. Nothing here calls the library's
// numerical routines; fields and formulas are re-typed from the model.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "preyswitch/model.hpp"

namespace testing_support {

using preyswitch::Parameters;
using preyswitch::RawParameters;

inline RawParameters reference_raw(double beta1 = 0.994) {
  RawParameters r;
  r.m = 0.790;
  r.r1 = 0.836;
  r.e = 0.948;
  r.q1 = 0.772;
  r.a_q = 0.660;
  r.q2 = 1.084;
  r.beta1 = beta1;
  r.beta2 = 0.896;
  r.r2 = 0.126;
  return r;
}

inline Parameters reference_params(double beta1 = 0.994) { return preyswitch::validate_parameters(reference_raw(beta1)); }

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
};

// Random admissible parameters with b_q > 0 and q1 > 0.
inline RawParameters random_raw(Rng& rng) {
  RawParameters r;
  r.r2 = rng.uniform(0.05, 0.5);
  r.r1 = r.r2 + rng.uniform(0.1, 1.0);
  r.a_q = rng.uniform(0.3, 1.5);
  r.q1 = rng.uniform(0.2, 1.5);
  r.q2 = r.a_q * r.q1 + rng.uniform(0.05, 1.0);
  r.e = rng.uniform(0.3, 1.5);
  r.beta1 = rng.uniform(0.3, 10.0);
  r.beta2 = rng.uniform(0.3, 10.0);
  r.m = rng.uniform(0.2, 1.5);
  return r;
}

// Transformed X and Y written out directly.
inline std::array<double, 3> oracle_x(const RawParameters& p, const std::array<double, 3>& s) {
  return {(p.r1 - s[2]) * s[0], p.r2 * s[1], (p.e * p.q1 * s[0] - p.m) * s[2]};
}

inline std::array<double, 3> oracle_y(const RawParameters& p, const std::array<double, 3>& s) {
  return {p.r1 * s[0], (p.r2 - p.beta2 / p.beta1 * s[2]) * s[1], (p.e * p.q2 / p.a_q * s[1] - p.m) * s[2]};
}

// Region from the signs of X h and Y h computed from the raw fields, with
// the fold and cusp read off X^2 h = X(Xh).
enum class SignRegion { Sliding, Crossing, Escaping, Fold, Cusp, Other };

inline SignRegion sign_region(const RawParameters& p, double x, double z, double tol = 1e-12) {
  const auto fx = oracle_x(p, {x, x, z});
  const auto fy = oracle_y(p, {x, x, z});
  const double xh = fx[0] - fx[1];
  const double yh = fy[0] - fy[1];
  if (std::abs(xh) <= tol * std::max(1.0, x)) {
    // derivative of Xh = (r1 - r2 - z) x along X, on the fold z = r1 - r2
    const double x2h = -fx[2] * x;
    if (std::abs(x2h) <= tol) return SignRegion::Cusp;
    return x2h > 0 ? SignRegion::Fold : SignRegion::Other;
  }
  if (xh < 0 && yh > 0) return SignRegion::Sliding;
  if (xh > 0 && yh < 0) return SignRegion::Escaping;
  if (xh * yh > 0) return SignRegion::Crossing;
  return SignRegion::Other;
}

// Classical RK4 with a fixed step; independent of the adaptive solver.
template <std::size_t N>
std::array<double, N> rk4_step(const std::function<std::array<double, N>(const std::array<double, N>&)>& f,
                               const std::array<double, N>& y, double h) {
  auto axpy = [](const std::array<double, N>& a, const std::array<double, N>& b, double c) {
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + c * b[i];
    return out;
  };
  const auto k1 = f(y);
  const auto k2 = f(axpy(y, k1, h / 2));
  const auto k3 = f(axpy(y, k2, h / 2));
  const auto k4 = f(axpy(y, k3, h));
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

struct OracleReturn {
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
};

// First return of the X-orbit from (x0, x0, phi) to x = y: fixed-step RK4,
// ignoring the plane until h has clearly left it, then bisection on the step.
inline OracleReturn oracle_mu(const RawParameters& p, double x0, double h = 2e-3) {
  const std::function<std::array<double, 3>(const std::array<double, 3>&)> f =
      [&p](const std::array<double, 3>& s) { return oracle_x(p, s); };
  std::array<double, 3> y{x0, x0, p.r1 - p.r2};
  double t = 0.0;
  bool left = false;
  while (t < 1000.0) {
    const auto next = rk4_step<3>(f, y, h);
    const double g = next[0] - next[1];
    if (g > 1e-9) left = true;
    if (left && g < 0) {
      double lo = 0.0, hi = h;
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        const auto trial = rk4_step<3>(f, y, mid);
        if (trial[0] - trial[1] > 0) lo = mid;
        else hi = mid;
      }
      const auto hit = rk4_step<3>(f, y, 0.5 * (lo + hi));
      return {t + 0.5 * (lo + hi), 0.5 * (hit[0] + hit[1]), hit[2]};
    }
    y = next;
    t += h;
  }
  return {-1.0, 0.0, 0.0};
}

// H(a x, z) typed out from its definition, in extended precision.
inline long double oracle_h_scaled(const RawParameters& p, long double x, long double z) {
  const long double b1 = p.beta1, b2 = p.beta2, s = b1 + b2;
  const long double kx = p.e * (p.a_q * p.q1 * b2 + p.q2 * b1) / (p.a_q * s);
  const long double kz = b2 / s;
  const long double g = (p.r2 * b1 + p.r1 * b2) / s;
  const long double a = s * (p.q2 * p.r2 * b1 + p.a_q * p.q1 * p.r1 * b2) /
                        ((p.q2 * b1 + p.a_q * p.q1 * b2) * (p.r2 * b1 + p.r1 * b2));
  const long double ax = a * x;
  return -p.m - g + kx * ax + kz * z - p.m * std::log(kx * ax / p.m) - g * std::log(kz * z / g);
}

// Derivative of H(a x, z) along the direction v by the five-point stencil.
inline double oracle_dh(const RawParameters& p, double x, double z, double vx, double vz) {
  const long double h = 1e-3L / std::max(1.0, std::hypot(vx, vz));
  auto f = [&](long double t) { return oracle_h_scaled(p, x + t * vx, z + t * vz); };
  return static_cast<double>((-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h));
}

// Focus condition on m, transcribed independently.
inline double oracle_mass_bound(const RawParameters& p) {
  const double bq = p.q2 - p.a_q * p.q1;
  const double phi = p.r1 - p.r2;
  const double s = p.q2 * p.r2 * p.beta1 + p.a_q * p.q1 * p.r1 * p.beta2;
  return 4 * (p.beta1 + p.beta2) * (p.r2 * p.beta1 + p.r1 * p.beta2) * s * s /
         (bq * bq * phi * phi * p.beta1 * p.beta1 * p.beta2 * p.beta2);
}

}  // namespace testing_support
