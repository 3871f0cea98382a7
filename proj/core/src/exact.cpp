#include "nullcone/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nullcone/errors.hpp"

namespace nullcone {

ConformalFactor stcmc_factor(const StcmcParams& p, GridPtr grid) {
  if (!(p.b > 0.0)) throw DomainError("stcmc_factor: area radius b must be positive");
  const double anorm = std::sqrt(1.0 + p.a[0] * p.a[0] + p.a[1] * p.a[1] + p.a[2] * p.a[2]);
  ScalarField omega(grid);
  const auto& g = *grid;
  for (int i = 0; i < g.nlat(); ++i)
    for (int j = 0; j < g.nlon(); ++j) {
      double d[3];
      g.node_direction(i, j, d);
      omega[g.node_index(i, j)] =
          p.b / (anorm - (p.a[0] * d[0] + p.a[1] * d[1] + p.a[2] * d[2]));
    }
  return ConformalFactor::from_omega(omega);
}

double sphere_solution(double b0, double t) {
  if (!(b0 > 0.0)) throw DomainError("sphere_solution: b0 must be positive");
  const double radicand = 1.0 + std::exp(2.0 * t) * (b0 * b0 - 1.0);
  if (!(radicand > 0.0))
    throw DomainError("sphere_solution: t = " + std::to_string(t) +
                      " is at or past the collapse time");
  return std::sqrt(radicand);
}

std::optional<double> sphere_extinction_time(double b0) {
  if (!(b0 > 0.0)) throw DomainError("sphere_extinction_time: b0 must be positive");
  if (b0 >= 1.0) return std::nullopt;
  return -0.5 * std::log(1.0 - b0 * b0);
}

LorentzBoost LorentzBoost::along(const std::array<double, 3>& dir, double rapidity) {
  const double n = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  if (!(n > 0.0)) throw InvalidArgument("LorentzBoost::along: zero direction");
  return {{dir[0] / n, dir[1] / n, dir[2] / n}, rapidity};
}

ConformalFactor mobius_transform(const Sht& sht, const ConformalFactor& w,
                                 const LorentzBoost& boost) {
  if (!w.grid().same_layout(sht.grid()))
    throw InvalidArgument("mobius_transform: transform grid mismatch");
  const SpectralCoeffs cu = sht.analyze(w.u());

  // Inverse boost (rapidity -s along the boost direction) applied to the
  // null ray (1, y): time component mu, renormalized direction psi.
  const double ch = std::cosh(boost.rapidity);
  const double sh = -std::sinh(boost.rapidity);
  const auto& d = boost.direction;
  const auto& g = w.grid();
  ScalarField u_out(w.grid_ptr());
  for (int i = 0; i < g.nlat(); ++i)
    for (int j = 0; j < g.nlon(); ++j) {
      double y[3];
      g.node_direction(i, j, y);
      const double dp = d[0] * y[0] + d[1] * y[1] + d[2] * y[2];
      const double mu = ch + sh * dp;                // time component of L^{-1}(1, y)
      const double coef = (ch - 1.0) * dp + sh;      // spatial part = y + coef * d
      const double p[3] = {(y[0] + coef * d[0]) / mu, (y[1] + coef * d[1]) / mu,
                           (y[2] + coef * d[2]) / mu};
      const double theta = std::acos(std::clamp(p[2], -1.0, 1.0));
      const double phi = std::atan2(p[1], p[0]);
      u_out[g.node_index(i, j)] = sht.evaluate(cu, theta, phi) - std::log(mu);
    }
  return ConformalFactor::from_log(std::move(u_out));
}

double ricci_time(double t) { return 0.5 * (1.0 - std::exp(-2.0 * t)); }

double flow_time_from_ricci(double t_hat) {
  if (!(t_hat < 0.5)) throw DomainError("flow_time_from_ricci: t_hat must be < 1/2");
  return -0.5 * std::log(1.0 - 2.0 * t_hat);
}

ConformalFactor ancient_profile(AncientKind kind, double t_hat, GridPtr grid) {
  if (!(t_hat < 0.0)) throw DomainError("ancient_profile: defined for t_hat < 0 only");
  if (kind == AncientKind::ShrinkingSphere)
    return ConformalFactor::constant(std::move(grid), std::sqrt(-2.0 * t_hat));

  // King--Rosenau profile, rewritten with E = e^{t_hat} (so 0 < E < 1):
  //   omega_hat^2 = 2(1 - E^2) / (2E + q(1 - E)^2),  q = (sin^2 theta)/2,
  // which stays in range for arbitrarily negative t_hat (no cosh overflow)
  // and degrades gracefully to 2/q away from the poles as E -> 0. The exact
  // poles (q = 0, where the profile grows like e^{-t_hat/2}) are never grid
  // nodes, so sampling is finite for every age.
  const double E = std::exp(t_hat);
  ScalarField u(grid);
  const auto& g = *grid;
  for (int i = 0; i < g.nlat(); ++i) {
    const double x = g.cos_colatitudes()[i];
    const double q = 0.5 * (1.0 - x) * (1.0 + x);  // (sin^2 theta)/2
    const double om2 = 2.0 * (1.0 - E * E) / (2.0 * E + q * (1.0 - E) * (1.0 - E));
    const double ui = 0.5 * std::log(om2);
    for (int j = 0; j < g.nlon(); ++j) u[g.node_index(i, j)] = ui;
  }
  return ConformalFactor::from_log(std::move(u));
}

std::optional<double> ancient_extinction_time(const AncientSolution& sol) {
  if (!(sol.t_hat_offset > 0.0))
    throw DomainError("ancient_extinction_time: t_hat_offset must be positive");
  if (sol.t_hat_offset >= 0.5) return std::nullopt;
  return -0.5 * std::log(1.0 - 2.0 * sol.t_hat_offset);
}

namespace {
// t_hat(t) - t_hat_0, grouped as ((1 - 2 t_hat_0) - e^{-2t})/2 so that the
// half-cancellation at large t (where t_hat(t) -> 1/2) happens between exact
// quantities; the naive difference loses ~8 digits already at t = 10.
double shifted_ricci_time(double t_hat_offset, double t) {
  if (!(t_hat_offset > 0.0)) throw DomainError("ancient solution: t_hat_offset must be positive");
  return 0.5 * ((1.0 - 2.0 * t_hat_offset) - std::exp(-2.0 * t));
}
}  // namespace

ConformalFactor nmcf_from_ancient(const Sht& sht, const AncientSolution& sol, double t) {
  const double th = shifted_ricci_time(sol.t_hat_offset, t);
  if (!(th < 0.0))
    throw DomainError("nmcf_from_ancient: t = " + std::to_string(t) +
                      " is at or past the extinction time");
  ConformalFactor scaled = [&] {
    if (sol.kind == AncientKind::ShrinkingSphere)
      // e^t sqrt(-2 t_hat) collapses to the sphere radius
      // sqrt(1 + (2 t_hat_0 - 1) e^{2t}), stable for arbitrarily early times.
      return ConformalFactor::constant(
          sht.grid_ptr(),
          std::sqrt(1.0 + (2.0 * sol.t_hat_offset - 1.0) * std::exp(2.0 * t)));
    ConformalFactor prof = ancient_profile(sol.kind, th, sht.grid_ptr());
    return ConformalFactor::from_log(prof.u() + t);
  }();
  if (!sol.boost) return scaled;
  return mobius_transform(sht, scaled, *sol.boost);
}

double ancient_area(const AncientSolution& sol, double t) {
  if (!(shifted_ricci_time(sol.t_hat_offset, t) < 0.0))
    throw DomainError("ancient_area: past extinction");
  // 8 pi e^{2t} (t_hat_0 - t_hat(t)) expanded so t -> -infinity never forms
  // the overflow-prone product e^{2t} * e^{-2t}.
  return 4.0 * std::numbers::pi +
         8.0 * std::numbers::pi * (sol.t_hat_offset - 0.5) * std::exp(2.0 * t);
}

}  // namespace nullcone
