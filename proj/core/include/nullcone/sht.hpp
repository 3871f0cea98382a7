#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nullcone/field.hpp"
#include "nullcone/grid.hpp"

namespace nullcone {

/// Coefficients of a real spherical-harmonic expansion up to degree lmax.
///
/// Basis: Y_{l0} = Nbar_{l0} P_l(cos theta) and, for m >= 1,
/// Y^c_{lm} = sqrt(2) Nbar_{lm} P_l^m cos(m phi),
/// Y^s_{lm} = sqrt(2) Nbar_{lm} P_l^m sin(m phi),
/// with Nbar the full orthonormalization (no Condon--Shortley phase), so the
/// basis is orthonormal for the solid-angle inner product. Storage is packed
/// by m-block; total size (lmax+1)^2.
class SpectralCoeffs {
 public:
  SpectralCoeffs() = default;
  explicit SpectralCoeffs(int lmax);

  int lmax() const { return lmax_; }
  int size() const { return static_cast<int>(c_.size()); }

  /// part: 0 = cos/zonal, 1 = sin (m >= 1 only).
  double& at(int l, int m, int part);
  double at(int l, int m, int part) const;

  const std::vector<double>& raw() const { return c_; }
  std::vector<double>& raw() { return c_; }

  /// Multiply every coefficient by s(l); used for the spectral Laplacian.
  void scale_by_degree(const std::function<double(int)>& s);

  /// Copy of the coefficients truncated (or zero-extended) to new_lmax.
  SpectralCoeffs truncated(int new_lmax) const;

 private:
  int lmax_ = -1;
  std::vector<double> c_;
};

/// Spherical-harmonic analysis/synthesis engine bound to one grid.
///
/// Longitude transforms use FFTW (plans created once, FFTW_ESTIMATE so plan
/// choice -- and therefore output bytes -- is reproducible); colatitude
/// transforms contract against precomputed orthonormal associated-Legendre
/// tables. Analysis of a band-limited field (degree <= lmax, wavenumber <
/// nlon/2) recovers coefficients to roundoff because the Gauss--Legendre rule
/// is exact through polynomial degree 2*nlat - 1.
///
/// Instances are immutable after construction and safe to share between
/// threads (FFTW execution uses the new-array interface on local buffers).
class Sht {
 public:
  explicit Sht(GridPtr grid);
  ~Sht();

  Sht(const Sht&) = delete;
  Sht& operator=(const Sht&) = delete;

  const SphericalGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int lmax() const { return grid_->lmax(); }

  SpectralCoeffs analyze(const ScalarField& f) const;
  /// Accepts coefficients with lmax <= grid lmax (zero-extended).
  ScalarField synthesize(const SpectralCoeffs& c) const;

  /// Spectral Laplace--Beltrami of the round unit sphere: multiplies degree-l
  /// coefficients by -l(l+1). One analysis + one synthesis.
  ScalarField laplacian(const ScalarField& f) const;
  SpectralCoeffs laplacian_coeffs(const SpectralCoeffs& c) const;

  /// Pointwise evaluation of a coefficient vector at an arbitrary direction
  /// (used for Moebius resampling); O(lmax^2) per point.
  double evaluate(const SpectralCoeffs& c, double theta, double phi) const;

 private:
  struct Impl;
  GridPtr grid_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nullcone
