#include "preyswitch/sliding.hpp"

#include <cmath>
#include <limits>

#include "preyswitch/error.hpp"

namespace preyswitch {

namespace {

constexpr double kComplexPairDisc = -1e-14;

// Coefficients of the closed-form field:
//   x' = c1 x - c2 x z
//   z' = c3 x - m z + c4 x z
struct SlidingCoefficients {
  double c1, c2, c3, c4;
};

SlidingCoefficients coefficients(const Parameters& p) noexcept {
  const double b1 = p.beta1();
  const double b2 = p.beta2();
  const double sum = b1 + b2;
  return {(b1 * p.r2() + b2 * p.r1()) / sum, b2 / sum,
          p.e() * (p.a_q() * p.q1() - p.q2()) * (p.r1() - p.r2()) * b1 / (p.a_q() * sum),
          p.e() * (b1 * p.q2() + p.a_q() * b2 * p.q1()) / (p.a_q() * sum)};
}

}  // namespace

Vec2 eval_sliding(const SigmaState& p, const Parameters& params, SlidingMode mode, double tol) {
  if (mode == SlidingMode::ClosedForm) {
    const auto c = coefficients(params);
    return {c.c1 * p.x - c.c2 * p.x * p.z, c.c3 * p.x - params.m() * p.z + c.c4 * p.x * p.z};
  }
  const State s = p.embed();
  const Vec3 fx = field_x(s, params);
  const Vec3 fy = field_y(s, params);
  // grad h = (1, -1, 0)
  const double xh = fx[0] - fx[1];
  const double yh = fy[0] - fy[1];
  const double denom = yh - xh;
  if (std::abs(denom) < tol)
    throw Error(ErrorKind::TangencyDenominator, "Yh - Xh vanishes at the requested point");
  Vec3 zs;
  for (int i = 0; i < 3; ++i) zs[i] = (yh * fx[i] - xh * fy[i]) / denom;
  const double scale = std::max({1.0, std::abs(zs[0]), std::abs(zs[1])});
  if (std::abs(zs[0] - zs[1]) > 1e-12 * scale)
    throw Error(ErrorKind::VerificationFailure, "generic sliding vector is not tangent to the switching plane");
  return {zs[0], zs[2]};
}

Mat2 sliding_jacobian(const SigmaState& p, const Parameters& params) noexcept {
  const auto c = coefficients(params);
  return {{{c.c1 - c.c2 * p.z, -c.c2 * p.x}, {c.c3 + c.c4 * p.z, -params.m() + c.c4 * p.x}}};
}

PseudoEquilibria pseudo_equilibria(const Parameters& p) noexcept {
  const double b1 = p.beta1();
  const double b2 = p.beta2();
  const double xc = p.a_q() * p.m() * (b1 * p.r2() + b2 * p.r1()) /
                    (p.e() * (b1 * p.q2() * p.r2() + p.a_q() * b2 * p.q1() * p.r1()));
  const double zc = p.r1() + b1 / b2 * p.r2();
  return {{0.0, 0.0}, {xc, zc}};
}

std::string_view to_string(FocusKind kind) noexcept {
  switch (kind) {
    case FocusKind::RepulsiveFocus: return "RepulsiveFocus";
    case FocusKind::Node: return "Node";
    case FocusKind::Saddle: return "Saddle";
    case FocusKind::Origin: return "Origin";
    case FocusKind::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

double focus_alpha(const Parameters& p) noexcept {
  const double b1 = p.beta1();
  const double b2 = p.beta2();
  return p.m() * p.b_q() * (p.r1() - p.r2()) * b1 * b2 /
         (2.0 * (b1 + b2) * (p.a_q() * p.q1() * p.r1() * b2 + p.q2() * p.r2() * b1));
}

double focus_mass_bound(const Parameters& p) noexcept {
  const double b1 = p.beta1();
  const double b2 = p.beta2();
  const double bq = p.b_q();
  if (bq == 0.0) return std::numeric_limits<double>::infinity();
  const double s = p.q2() * p.r2() * b1 + p.a_q() * p.q1() * p.r1() * b2;
  const double phi = p.phi();
  return 4.0 * (b1 + b2) * (p.r2() * b1 + p.r1() * b2) * s * s / (bq * bq * phi * phi * b1 * b1 * b2 * b2);
}

double focus_mass_bound_via_height(double zh, const Parameters& p) noexcept {
  const double bq = p.b_q();
  if (bq == 0.0) return std::numeric_limits<double>::infinity();
  const double phi = p.phi();
  const double lift = zh - p.r1();
  const double s = p.a_q() * p.q1() * p.r1() + p.q2() * lift;
  return 4.0 * p.r2() * zh * (zh - phi) * s * s / (phi * phi * bq * bq * lift * lift);
}

bool focus_condition(const Parameters& p) noexcept { return p.m() < focus_mass_bound(p); }

PseudoEquilibrium classify_focus(const Parameters& params) {
  PseudoEquilibrium out;
  out.location = pseudo_equilibria(params).interior;
  out.alpha = focus_alpha(params);
  const Mat2 j = sliding_jacobian(out.location, params);
  const double trace = j[0][0] + j[1][1];
  const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
  out.discriminant = trace * trace - 4.0 * det;
  out.beta_imag = out.discriminant < kComplexPairDisc ? 0.5 * std::sqrt(-out.discriminant) : 0.0;
  if (params.b_q() == 0.0 || out.alpha == 0.0) {
    out.kind = FocusKind::Degenerate;
  } else if (det < 0.0) {
    out.kind = FocusKind::Saddle;
  } else if (out.beta_imag > 0.0) {
    out.kind = FocusKind::RepulsiveFocus;
  } else {
    out.kind = FocusKind::Node;
  }
  return out;
}

PseudoEquilibrium classify_origin(const Parameters& params) noexcept {
  PseudoEquilibrium out;
  out.location = {0.0, 0.0};
  const Mat2 j = sliding_jacobian(out.location, params);
  const double trace = j[0][0] + j[1][1];
  const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
  out.alpha = 0.5 * trace;
  out.discriminant = trace * trace - 4.0 * det;
  out.kind = FocusKind::Origin;
  return out;
}

double h_scaling_constant(const Parameters& p) noexcept {
  const double b1 = p.beta1();
  const double b2 = p.beta2();
  return (b1 + b2) * (p.q2() * p.r2() * b1 + p.a_q() * p.q1() * p.r1() * b2) /
         ((p.q2() * b1 + p.a_q() * p.q1() * b2) * (p.r2() * b1 + p.r1() * b2));
}

namespace {

struct HTerms {
  double kx;  // coefficient of x
  double kz;  // coefficient of z
  double growth;
};

HTerms h_terms(const Parameters& p) noexcept {
  const double b1 = p.beta1();
  const double b2 = p.beta2();
  const double sum = b1 + b2;
  return {p.e() * (p.a_q() * p.q1() * b2 + p.q2() * b1) / (p.a_q() * sum), b2 / sum,
          (p.r2() * b1 + p.r1() * b2) / sum};
}

}  // namespace

double first_integral_H(double x, double z, const Parameters& p) {
  if (!(x > 0.0) || !(z > 0.0))
    throw Error(ErrorKind::DomainError, "first integral H needs x > 0 and z > 0");
  const auto t = h_terms(p);
  const double m = p.m();
  return -m - t.growth + t.kx * x + t.kz * z - m * std::log(t.kx * x / m) -
         t.growth * std::log(t.kz * z / t.growth);
}

MonotonicityWitnesses monotonicity_witnesses(const SigmaState& pt, const Parameters& p) {
  if (!(pt.x > 0.0) || !(pt.z > 0.0))
    throw Error(ErrorKind::DomainError, "monotonicity witnesses need x > 0 and z > 0");
  MonotonicityWitnesses w;
  w.dulac_div = p.e() * p.b_q() * p.phi() * p.beta1() / (p.a_q() * (p.beta1() + p.beta2()) * pt.z * pt.z);
  w.h_value = first_integral_H(pt.x, pt.z, p);
  // <grad of (x, z) -> H(a x, z), Z^s>, multiplied out into a product so
  // that nothing cancels near z = z_c
  const double b1 = p.beta1();
  const double b2 = p.beta2();
  const double sum = b1 + b2;
  const double lift = p.r2() * b1 + (p.r1() - pt.z) * b2;
  w.dh_along_flow = p.e() * pt.x * p.b_q() * p.phi() * b1 * lift * lift /
                    (p.a_q() * pt.z * sum * sum * (p.r2() * b1 + p.r1() * b2));
  return w;
}

namespace {

double hyperbola_height(double x, const Parameters& p) {
  const double denom = p.e() * p.q2() * x - p.a_q() * p.m();
  if (std::abs(denom) <= 1e-12 * p.a_q() * p.m())
    throw Error(ErrorKind::PoleError, "x is at the vertical asymptote of the tangency hyperbola");
  const double zh = p.e() * p.b_q() * p.r1() * x / denom;
  if (!(zh > 0.0)) throw Error(ErrorKind::DomainError, "tangency hyperbola has z_h <= 0 here");
  return zh;
}

}  // namespace

HyperbolaPoint hyperbola_and_Fc(double x, const Parameters& params, const SigmaState& focus) {
  if (!(x > 0.0)) throw Error(ErrorKind::DomainError, "hyperbola needs x > 0");
  HyperbolaPoint out;
  out.z_h = hyperbola_height(x, params);
  out.f_c = first_integral_F(x, out.z_h, params) - first_integral_F(focus.x, focus.z, params);
  return out;
}

double hyperbola_Fc_slope(double x, const Parameters& p) {
  const double zh = hyperbola_height(x, p);
  const double denom = p.e() * p.q2() * x - p.a_q() * p.m();
  const double dzh = -p.a_q() * p.m() * p.e() * p.b_q() * p.r1() / (denom * denom);
  const double fx = p.e() * p.q1() - p.m() / x;
  const double fz = 1.0 - p.r1() / zh;
  return fx + fz * dzh;
}

}  // namespace preyswitch
