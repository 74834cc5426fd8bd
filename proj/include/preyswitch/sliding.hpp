#pragma once

#include <array>
#include <string_view>

#include "preyswitch/model.hpp"

namespace preyswitch {

enum class SlidingMode {
  ClosedForm,       // the specialized planar formula
  GenericFilippov,  // convex combination of X and Y tangent to the plane (cross-check)
};

/// Sliding vector field on the switching plane as (x-rate, z-rate).
/// GenericFilippov throws TangencyDenominator when |Yh - Xh| < tol.
Vec2 eval_sliding(const SigmaState& p, const Parameters& params,
                  SlidingMode mode = SlidingMode::ClosedForm, double tol = 1e-12);

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Analytic Jacobian of the closed-form sliding field.
Mat2 sliding_jacobian(const SigmaState& p, const Parameters& params) noexcept;

struct PseudoEquilibria {
  SigmaState origin;
  SigmaState interior;  // (x_c, z_c)
};

PseudoEquilibria pseudo_equilibria(const Parameters& params) noexcept;

enum class FocusKind { RepulsiveFocus, Node, Saddle, Origin, Degenerate };
std::string_view to_string(FocusKind kind) noexcept;

struct PseudoEquilibrium {
  SigmaState location;
  double alpha = 0.0;      // real part of the eigenvalue pair
  double beta_imag = 0.0;  // |imaginary part|, zero for real eigenvalues
  double discriminant = 0.0;
  FocusKind kind = FocusKind::Degenerate;
};

/// Eigenstructure of the interior pseudo-equilibrium. alpha is the closed
/// form; beta_imag = sqrt(|disc|)/2 of the Jacobian when disc < -1e-14.
PseudoEquilibrium classify_focus(const Parameters& params);

/// The origin equilibrium and its (real) eigenvalues; kind is always Origin.
PseudoEquilibrium classify_origin(const Parameters& params) noexcept;

/// Closed-form real part of the focus eigenvalues.
double focus_alpha(const Parameters& params) noexcept;

/// Upper bound on m for the interior equilibrium to be a focus. Infinite
/// when b_q == 0.
double focus_mass_bound(const Parameters& params) noexcept;

/// The same bound rewritten through z_c, with beta2 and e eliminated by the
/// equilibrium identities. Evaluated with an arbitrary z in place of z_c it
/// gives the bound used when placing the focus at a prescribed height.
double focus_mass_bound_via_height(double z_height, const Parameters& params) noexcept;

/// m < focus_mass_bound(params).
bool focus_condition(const Parameters& params) noexcept;

/// Lotka-Volterra first integral of the sliding field without its linear
/// perturbation term.
double first_integral_H(double x, double z, const Parameters& params);

/// Scaling constant a in H(a x, z).
double h_scaling_constant(const Parameters& params) noexcept;

struct MonotonicityWitnesses {
  double dulac_div = 0.0;      // divergence of Z^s / (x z)
  double h_value = 0.0;        // H(x, z)
  double dh_along_flow = 0.0;  // d/dt H(a x, z) along the sliding flow
};

/// Throws DomainError for x <= 0 or z <= 0.
MonotonicityWitnesses monotonicity_witnesses(const SigmaState& p, const Parameters& params);

struct HyperbolaPoint {
  double z_h = 0.0;
  double f_c = 0.0;
};

/// Point of the curve where the sliding field is tangent to the F level sets,
/// and the F-level offset relative to the focus. Throws PoleError at the
/// vertical asymptote and DomainError when z_h <= 0.
HyperbolaPoint hyperbola_and_Fc(double x, const Parameters& params, const SigmaState& focus);

/// d/dx F_c(x) by the chain rule.
double hyperbola_Fc_slope(double x, const Parameters& params);

}  // namespace preyswitch
