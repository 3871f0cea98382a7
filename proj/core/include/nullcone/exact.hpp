#pragma once

#include <array>
#include <optional>

#include "nullcone/conformal.hpp"
#include "nullcone/sht.hpp"

namespace nullcone {

/// Parameters of the constant-curvature conformal factors
///   omega_{b,a}(x) = b / (sqrt(1 + |a|^2) - a . x),
/// the full family of cross sections with constant spacetime mean curvature:
/// area radius b, boost vector a.
struct StcmcParams {
  double b = 1.0;
  std::array<double, 3> a{0.0, 0.0, 0.0};
};

/// Sample omega_{b,a} on a grid. Throws DomainError unless b > 0.
ConformalFactor stcmc_factor(const StcmcParams& p, GridPtr grid);

/// Round-sphere area radius under the de Sitter cone flow:
///   b(t) = sqrt(1 + e^{2t}(b0^2 - 1)).
/// Stationary at b0 = 1; collapses in finite time for b0 < 1. Throws
/// DomainError at or past the collapse time.
double sphere_solution(double b0, double t);

/// Collapse time of the round sphere, 0.5*ln(1/(1-b0^2)) for b0 < 1;
/// empty when the sphere never collapses (b0 >= 1).
std::optional<double> sphere_extinction_time(double b0);

/// Restricted Lorentz transformation acting on cone cross sections.
struct LorentzBoost {
  std::array<double, 3> direction{0.0, 0.0, 1.0};  // unit vector
  double rapidity = 0.0;

  /// Normalizes dir; throws InvalidArgument on a zero vector.
  static LorentzBoost along(const std::array<double, 3>& dir, double rapidity);
};

/// Action of a boost on a cross section: the surface point omega(x)(1, x) of
/// the auxiliary null cone maps to omega'(y)(1, y) with
/// omega'(y) = omega(psi(y)) / mu(y), where L^{-1}(1, y) = mu(y)(1, psi(y)).
/// The pulled-back factor is resampled onto the grid through the transform
/// (the action does not preserve band limits, so resampling incurs spectral
/// truncation error). Being an ambient isometry, the action preserves area.
ConformalFactor mobius_transform(const Sht& sht, const ConformalFactor& w,
                                 const LorentzBoost& boost);

//----------------------------------------------------------------------------
// Ancient solutions and the rescaled-time correspondence
//----------------------------------------------------------------------------

/// Rescaled time in which the normalized flow becomes 2d Ricci flow:
/// t_hat(t) = (1 - e^{-2t})/2, increasing from -infinity to 1/2.
double ricci_time(double t);

/// Inverse of ricci_time; requires t_hat < 1/2.
double flow_time_from_ricci(double t_hat);

enum class AncientKind { ShrinkingSphere, KingRosenau };

/// Self-contained Ricci-flow profiles on the sphere, defined for t_hat < 0:
///   ShrinkingSphere: omega_hat^2 = -2 t_hat
///   KingRosenau:     omega_hat^2 = 2 sinh(-t_hat) / (1 + (sin^2 theta)/2 * (cosh(-t_hat) - 1))
/// (the latter evaluated in an exponentially stable form). Throws DomainError
/// for t_hat >= 0.
ConformalFactor ancient_profile(AncientKind kind, double t_hat, GridPtr grid);

/// One ancient flow solution: profile family, offset t_hat_0 > 0, optional
/// boost. Eternal when t_hat_0 >= 1/2, extinct in finite time otherwise.
struct AncientSolution {
  AncientKind kind = AncientKind::ShrinkingSphere;
  double t_hat_offset = 0.5;
  std::optional<LorentzBoost> boost;
};

/// Extinction time -0.5*ln(1 - 2*t_hat_0), empty when the solution is eternal.
std::optional<double> ancient_extinction_time(const AncientSolution& sol);

/// The ancient solution at flow time t: omega(t,.) = e^t omega_hat(t_hat(t) - t_hat_0, .)
/// with the optional boost applied. Throws DomainError at or past extinction.
ConformalFactor nmcf_from_ancient(const Sht& sht, const AncientSolution& sol, double t);

/// Closed-form area 8 pi e^{2t} (t_hat_0 - t_hat(t)); boosts act by ambient
/// isometry, so this also covers boosted solutions. Tends to 4 pi as
/// t -> -infinity for every member of the family.
double ancient_area(const AncientSolution& sol, double t);

}  // namespace nullcone
