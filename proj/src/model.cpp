#include "preyswitch/model.hpp"

#include <cmath>
#include <sstream>

#include "preyswitch/error.hpp"

namespace preyswitch {

namespace {

void require(bool ok, const char* inequality, const RawParameters& raw) {
  if (ok) return;
  std::ostringstream msg;
  msg.precision(17);
  msg << inequality << " violated (r1=" << raw.r1 << ", r2=" << raw.r2 << ", a_q=" << raw.a_q
      << ", q1=" << raw.q1 << ", q2=" << raw.q2 << ", beta1=" << raw.beta1
      << ", beta2=" << raw.beta2 << ", m=" << raw.m << ", e=" << raw.e << ")";
  throw Error(ErrorKind::ConstraintViolation, msg.str());
}

}  // namespace

double Parameters::tau() const {
  if (!has_tau()) throw Error(ErrorKind::DegenerateTau, "tau = m/(e q1) is undefined for q1 = 0");
  return raw_.m / (raw_.e * raw_.q1);
}

Parameters Parameters::with_beta1(double beta1) const {
  RawParameters raw = raw_;
  raw.beta1 = beta1;
  return validate_parameters(raw);
}

Parameters validate_parameters(const RawParameters& raw) {
  const double all[] = {raw.r1, raw.r2, raw.a_q, raw.q1, raw.q2, raw.beta1, raw.beta2, raw.m, raw.e};
  for (double v : all) require(std::isfinite(v), "finite values", raw);
  require(raw.r2 > 0.0, "r2 > 0", raw);
  require(raw.r1 > raw.r2, "r1 > r2", raw);
  require(raw.a_q > 0.0, "a_q > 0", raw);
  require(raw.q1 >= 0.0, "q1 >= 0", raw);
  require(raw.q2 >= 0.0, "q2 >= 0", raw);
  require(raw.q2 - raw.a_q * raw.q1 >= 0.0, "b_q >= 0", raw);
  require(raw.e > 0.0, "e > 0", raw);
  require(raw.beta1 > 0.0, "beta1 > 0", raw);
  require(raw.beta2 > 0.0, "beta2 > 0", raw);
  require(raw.m > 0.0, "m > 0", raw);
  return Parameters(raw);
}

std::string_view to_string(RegionLabel label) noexcept {
  switch (label) {
    case RegionLabel::Sliding: return "Sliding";
    case RegionLabel::Crossing: return "Crossing";
    case RegionLabel::VisibleFold: return "VisibleFold";
    case RegionLabel::Cusp: return "Cusp";
    case RegionLabel::OriginLine: return "OriginLine";
    case RegionLabel::Boundary: return "Boundary";
  }
  return "Unknown";
}

std::string_view to_string(Piece piece) noexcept {
  switch (piece) {
    case Piece::X: return "X";
    case Piece::Y: return "Y";
    case Piece::PlanarLV: return "PlanarLV";
  }
  return "Unknown";
}

State to_model_coords(const BioState& bio, const Parameters& params) {
  if (bio.p1 < 0.0 || bio.p2 < 0.0 || bio.P < 0.0)
    throw Error(ErrorKind::DomainError, "population densities must be nonnegative");
  return {bio.p1 / params.beta1(), bio.p2 / (params.a_q() * params.beta2()), bio.P / params.beta1()};
}

Vec3 field_x(const State& s, const Parameters& params) noexcept {
  return {(params.r1() - s.z) * s.x, params.r2() * s.y,
          (params.e() * params.q1() * s.x - params.m()) * s.z};
}

Vec3 field_y(const State& s, const Parameters& params) noexcept {
  return {params.r1() * s.x, (params.r2() - params.beta2() / params.beta1() * s.z) * s.y,
          (params.e() * params.q2() / params.a_q() * s.y - params.m()) * s.z};
}

Vec2 field_planar(double x, double z, const Parameters& params) noexcept {
  return {(params.r1() - z) * x, (params.e() * params.q1() * x - params.m()) * z};
}

Vec3 eval_field(Piece piece, const State& s, const Parameters& params) noexcept {
  switch (piece) {
    case Piece::X: return field_x(s, params);
    case Piece::Y: return field_y(s, params);
    case Piece::PlanarLV: {
      const Vec2 v = field_planar(s.x, s.z, params);
      return {v[0], 0.0, v[1]};
    }
  }
  return {};
}

LieDerivatives lie_derivatives(const SigmaState& p, const Parameters& params) noexcept {
  const double phi = params.phi();
  return {(phi - p.z) * p.x, (phi + params.beta2() / params.beta1() * p.z) * p.x,
          phi * (params.m() - params.e() * params.q1() * p.x) * p.x};
}

RegionLabel classify_sigma_point(const SigmaState& p, const Parameters& params, double tol) {
  if (!(p.x >= 0.0) || !(p.z >= 0.0))
    throw Error(ErrorKind::DomainError, "switching-plane point needs x >= 0 and z >= 0");
  if (p.x <= tol) return RegionLabel::OriginLine;
  const double phi = params.phi();
  if (std::abs(p.z - phi) <= tol) {
    if (params.has_tau() && std::abs(p.x - params.tau()) <= tol) return RegionLabel::Cusp;
    return lie_derivatives(p, params).x2h > 0.0 ? RegionLabel::VisibleFold : RegionLabel::Boundary;
  }
  if (p.z <= tol) return RegionLabel::Boundary;
  return p.z > phi ? RegionLabel::Sliding : RegionLabel::Crossing;
}

double first_integral_F(double x, double z, const Parameters& params) {
  if (!(x > 0.0) || !(z > 0.0))
    throw Error(ErrorKind::DomainError, "first integral F needs x > 0 and z > 0");
  const double m = params.m();
  const double r1 = params.r1();
  const double k = params.e() * params.q1();
  if (!params.has_tau()) throw Error(ErrorKind::DegenerateTau, "F needs q1 > 0");
  return -m - r1 + k * x + z - m * std::log(k * x / m) - r1 * std::log(z / r1);
}

}  // namespace preyswitch
