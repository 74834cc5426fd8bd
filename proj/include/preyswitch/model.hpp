#pragma once

#include <array>
#include <string_view>

namespace preyswitch {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// The nine model parameters as read from input, before any checking.
struct RawParameters {
  double r1 = 0.0;     // growth rate, preferred prey (1/day)
  double r2 = 0.0;     // growth rate, alternative prey (1/day)
  double a_q = 0.0;    // preference trade-off slope
  double q1 = 0.0;     // preference for the preferred prey
  double q2 = 0.0;     // preference for the alternative prey
  double beta1 = 0.0;  // predation death rate, preferred prey
  double beta2 = 0.0;  // predation death rate, alternative prey
  double m = 0.0;      // predator death rate (1/day)
  double e = 0.0;      // conversion efficiency

  bool operator==(const RawParameters&) const = default;
};

/// A validated parameter vector. Only obtainable through validate_parameters,
/// so every instance satisfies the admissibility constraints.
class Parameters {
 public:
  double r1() const noexcept { return raw_.r1; }
  double r2() const noexcept { return raw_.r2; }
  double a_q() const noexcept { return raw_.a_q; }
  double q1() const noexcept { return raw_.q1; }
  double q2() const noexcept { return raw_.q2; }
  double beta1() const noexcept { return raw_.beta1; }
  double beta2() const noexcept { return raw_.beta2; }
  double m() const noexcept { return raw_.m; }
  double e() const noexcept { return raw_.e; }

  double phi() const noexcept { return raw_.r1 - raw_.r2; }
  double b_q() const noexcept { return raw_.q2 - raw_.a_q * raw_.q1; }
  /// m / (e q1); throws DegenerateTau when q1 == 0.
  double tau() const;
  bool has_tau() const noexcept { return raw_.q1 > 0.0; }

  const RawParameters& raw() const noexcept { return raw_; }

  /// Revalidated copy with beta1 replaced.
  Parameters with_beta1(double beta1) const;

 private:
  friend Parameters validate_parameters(const RawParameters& raw);
  explicit Parameters(const RawParameters& raw) : raw_(raw) {}
  RawParameters raw_;
};

/// Throws ConstraintViolation naming the first violated inequality.
Parameters validate_parameters(const RawParameters& raw);

/// Population densities in the transformed coordinates where the switching
/// plane is x = y.
struct State {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 to_array() const noexcept { return {x, y, z}; }
  static State from_array(const Vec3& v) noexcept { return {v[0], v[1], v[2]}; }
};

/// A point (x, x, z) of the switching plane.
struct SigmaState {
  double x = 0.0;
  double z = 0.0;

  State embed() const noexcept { return {x, x, z}; }
};

enum class RegionLabel { Sliding, Crossing, VisibleFold, Cusp, OriginLine, Boundary };
std::string_view to_string(RegionLabel label) noexcept;

enum class Piece { X, Y, PlanarLV };
std::string_view to_string(Piece piece) noexcept;

/// Biological densities (p1, p2, P).
struct BioState {
  double p1 = 0.0;
  double p2 = 0.0;
  double P = 0.0;
};

State to_model_coords(const BioState& bio, const Parameters& params);

/// h(x, y, z) = x - y.
inline double switching_function(const State& s) noexcept { return s.x - s.y; }

Vec3 field_x(const State& s, const Parameters& params) noexcept;
Vec3 field_y(const State& s, const Parameters& params) noexcept;
/// Restriction of X to the invariant plane y = 0, in (x, z).
Vec2 field_planar(double x, double z, const Parameters& params) noexcept;

/// Right-hand side of X or Y. For PlanarLV the y component of the result is
/// zero and s.y is ignored.
Vec3 eval_field(Piece piece, const State& s, const Parameters& params) noexcept;

struct LieDerivatives {
  double xh = 0.0;
  double yh = 0.0;
  double x2h = 0.0;  // second derivative of h along X on the fold line
};

LieDerivatives lie_derivatives(const SigmaState& p, const Parameters& params) noexcept;

constexpr double kDefaultTangencyTol = 1e-12;

/// Region of the switching plane containing p. Throws DomainError for
/// negative coordinates.
RegionLabel classify_sigma_point(const SigmaState& p, const Parameters& params,
                                 double tol = kDefaultTangencyTol);

/// Lotka-Volterra first integral of the planar piece; zero at its center
/// (tau, r1) and positive elsewhere.
double first_integral_F(double x, double z, const Parameters& params);

}  // namespace preyswitch
