#pragma once

#include <array>
#include <functional>
#include <memory>
#include <ostream>
#include <utility>
#include <vector>

#include "nullcone/conformal.hpp"

namespace nullcone {

/// One non-degenerate Killing horizon of a static radial profile.
struct HorizonInfo {
  double radius = 0.0;         // r_i with h(r_i) = 0
  double slope_inverse = 0.0;  // K_i = 1 / h'(r_i)
};

/// Locate every simple zero of h on (r_lo, r_hi): uniform sign-change scan,
/// bisection, Newton polish (|h| < 1e-12 at each result). A zero that h
/// touches without crossing (h' = 0 there) throws DomainError -- the
/// double-null extension requires non-degenerate horizons.
std::vector<HorizonInfo> find_horizons(const std::function<double(double)>& h, double r_lo,
                                       double r_hi, int scan_samples = 2048);

/// Static spherically symmetric background -h dt^2 + dr^2/h + r^2 dOmega^2,
/// identified by its radial profile h on a working bracket, with all
/// horizons located up front.
struct ClassSModel {
  std::function<double(double)> h;
  double r_lo = 0.0, r_hi = 0.0;
  std::vector<HorizonInfo> horizons;

  static ClassSModel create(std::function<double(double)> h, double r_lo, double r_hi);
  /// h = 1 - r^2: the single horizon r = 1 with K = -1/2.
  static ClassSModel de_sitter(double r_lo = 0.02, double r_hi = 3.0);
};

/// Double-null chart extending the static metric across one horizon:
///   g = F(rho)(du dv + dv du) + rho^2 dOmega^2,   u v = f(rho),
/// where f is the strictly increasing solution of f / f' = K h with
/// f(r_i) = 0, normalized by f'(r_i) = 1, and F = 2K / f'. The radial
/// domain covers the horizon's neighborhood up to the bracket ends or a
/// safety margin short of the neighboring horizons (where 1/h blows up).
///
/// f, f', and F evaluate from smooth series data (no interpolation kinks),
/// so finite-difference curvature probes of the chart converge at their
/// nominal order. Charts are immutable after construction; all queries are
/// thread-safe. Instances are move-only.
class KruskalChart {
 public:
  ~KruskalChart();
  KruskalChart(KruskalChart&&) noexcept;
  KruskalChart& operator=(KruskalChart&&) noexcept;
  KruskalChart(const KruskalChart&) = delete;
  KruskalChart& operator=(const KruskalChart&) = delete;

  double horizon_radius() const;
  double surface_gravity_inverse() const;  // K = 1/h'(r_i)
  double lightcone_constant() const;       // the c of the {v = c} cone
  double r_lo() const;
  double r_hi() const;

  /// Throw DomainError outside [r_lo, r_hi].
  double f(double r) const;
  double f_prime(double r) const;
  double F(double r) const;  // 2K / f'(r); finite and smooth across f = 0

  /// Inverse of f: the unique radius with f(rho) = uv (monotone-spline seed,
  /// bracketed Newton polish). Throws DomainError when uv lies outside
  /// [f(r_lo), f(r_hi)].
  double rho(double uv) const;

  struct Metric {
    double guv = 0.0;    // F(rho(u v))
    double radius = 0.0; // rho(u v)
  };
  Metric metric_components(double u, double v) const;

  /// Cross section omega of the lightcone {v = c} as per-node null
  /// coordinates (u, v) = (f(omega(x))/c, c). Throws DomainError when omega
  /// leaves the chart's radial domain.
  std::vector<std::pair<double, double>> embed_cross_section(const ConformalFactor& w) const;

  /// Columns: r, f, f_prime, F at the requested sampling density.
  void write_csv(std::ostream& os, int samples = 400) const;

 private:
  friend KruskalChart solve_f(const ClassSModel&, int, double);
  KruskalChart();
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Build the chart of horizon_index (into model.horizons). The ODE
/// f / f' = K h is solved through the substitution f = (r - r_i) e^G, where
/// G integrates the pole-free remainder of 1/(K h); both factors come from
/// adaptive Chebyshev fits, so the ODE residual sits near rounding level.
/// Throws DomainError when h vanishes inside the chart domain away from the
/// chart's own horizon, and InvalidArgument for a bad index or
/// lightcone_constant <= 0.
KruskalChart solve_f(const ClassSModel& model, int horizon_index, double lightcone_constant = 1.0);

/// Geometry of the background foliation leaf S^2_r: the induced metric
/// coefficient and the two null second fundamental forms are all round
/// (coefficient times dOmega^2), and the connection 1-form vanishes.
struct BackgroundLeaf {
  double gamma_coeff = 0.0;    // induced metric  r^2 dOmega^2
  double chi_bar_coeff = 0.0;  // cone-directed form  r dOmega^2
  double chi_coeff = 0.0;      // transverse form  r h(r) dOmega^2
  double zeta = 0.0;           // connection 1-form, identically 0
};
BackgroundLeaf background_leaf(const ClassSModel& model, double r);

enum class PseudospherePatch { StaticPlus, StaticMinus, CosmologicalPlus, CosmologicalMinus };

/// Isometric embedding of the de Sitter static (r < 1) and cosmological
/// (r > 1) patches into the unit pseudosphere {eta(p,p) = 1} of Minkowski
/// 5-space, eta = diag(-,+,+,+,+):
///   static +/-        (+/- sqrt(1-r^2) sinh t, +/- sqrt(1-r^2) cosh t, r x)
///   cosmological +/-  (+/- sqrt(r^2-1) cosh t, +/- sqrt(r^2-1) sinh t, r x)
/// Throws DomainError when r lies outside the patch's radial range.
std::array<double, 5> pseudosphere_embed(PseudospherePatch patch, double t, double r,
                                         const std::array<double, 3>& x);

/// eta(a, b) with signature (-,+,+,+,+).
double minkowski5_inner(const std::array<double, 5>& a, const std::array<double, 5>& b);

}  // namespace nullcone
