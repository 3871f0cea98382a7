#include "nullcone/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nullcone/errors.hpp"

namespace nullcone {
namespace {

// Gauss--Legendre nodes and weights on [-1, 1] by Newton iteration on P_n,
// carried out in long double. Double-precision node error shows up in
// high-degree Legendre table entries amplified by l(l+1) in the Laplacian,
// so sub-ulp nodes are not a luxury here.
void gauss_legendre(int n, std::vector<long double>& x, std::vector<long double>& w) {
  x.assign(n, 0.0L);
  w.assign(n, 0.0L);
  const long double pi = std::numbers::pi_v<long double>;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess for the i-th root (descending order).
    long double z = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 200; ++it) {
      long double p0 = 1.0L, p1 = 0.0L;
      for (int j = 0; j < n; ++j) {
        const long double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0L);
      const long double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    // Store ascending in x: the loop above walks roots from largest down.
    x[i] = -z;
    x[n - 1 - i] = z;
    const long double wi = 2.0L / ((1.0L - z * z) * pp * pp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
}

}  // namespace

SphericalGrid::SphericalGrid(int nlat, int nlon, int lmax)
    : nlat_(nlat), nlon_(nlon), lmax_(lmax) {
  two_pi_over_nlon_ = 2.0 * std::numbers::pi / nlon;

  std::vector<long double> x, w;
  gauss_legendre(nlat, x, w);

  colat_.resize(nlat);
  cos_colat_.resize(nlat);
  sin_colat_.resize(nlat);
  lat_w_.resize(nlat);
  cos_colat_ld_.resize(nlat);
  for (int i = 0; i < nlat; ++i) {
    // Row 0 sits nearest the north pole: colatitude ascends, so x descends.
    const long double xi = x[nlat - 1 - i];
    cos_colat_ld_[i] = xi;
    cos_colat_[i] = static_cast<double>(xi);
    sin_colat_[i] = static_cast<double>(std::sqrt((1.0L - xi) * (1.0L + xi)));
    colat_[i] = std::acos(cos_colat_[i]);
    lat_w_[i] = static_cast<double>(w[nlat - 1 - i]);
  }

  lon_.resize(nlon);
  for (int j = 0; j < nlon; ++j) lon_[j] = two_pi_over_nlon_ * j;
}

std::shared_ptr<const SphericalGrid> SphericalGrid::create(int nlat, int nlon, int lmax) {
  if (lmax < 0) lmax = nlat - 1;
  if (nlat < 2) throw InvalidArgument("SphericalGrid: nlat must be >= 2");
  if (lmax > nlat - 1)
    throw InvalidArgument("SphericalGrid: lmax " + std::to_string(lmax) +
                          " exceeds quadrature capacity nlat-1 = " + std::to_string(nlat - 1));
  if (nlon < 2 * lmax + 2)
    throw InvalidArgument("SphericalGrid: nlon " + std::to_string(nlon) +
                          " too small for lmax " + std::to_string(lmax) +
                          " (need nlon >= 2*lmax+2)");
  if (nlon < 2 * nlat)
    throw InvalidArgument("SphericalGrid: nlon " + std::to_string(nlon) +
                          " too small for nlat " + std::to_string(nlat) +
                          " (need nlon >= 2*nlat)");
  return std::shared_ptr<const SphericalGrid>(new SphericalGrid(nlat, nlon, lmax));
}

void SphericalGrid::node_direction(int ilat, int ilon, double out[3]) const {
  const double s = sin_colat_[ilat];
  out[0] = s * std::cos(lon_[ilon]);
  out[1] = s * std::sin(lon_[ilon]);
  out[2] = cos_colat_[ilat];
}

}  // namespace nullcone
