#pragma once

#include <memory>
#include <vector>

namespace nullcone {

/// Gauss--Legendre x uniform-longitude collocation grid on the unit sphere.
///
/// Colatitudes are the arccos of Gauss--Legendre nodes (ascending colatitude,
/// i.e. from the north pole toward the south pole); longitudes are uniform,
/// phi_j = 2 pi j / nlon. Node storage order is row-major: latitude row i
/// holds entries [i*nlon, (i+1)*nlon). Quadrature weights are per node and
/// sum to 4 pi, exact for spherical harmonics through degree 2*nlat - 1 in
/// colatitude and wavenumber < nlon in longitude.
///
/// Grids are immutable and shared between fields via shared_ptr.
class SphericalGrid {
 public:
  /// lmax < 0 means the default nlat - 1. Requirements: nlat >= 2,
  /// nlon >= 2*lmax + 2, lmax <= nlat - 1.
  static std::shared_ptr<const SphericalGrid> create(int nlat, int nlon, int lmax = -1);

  int nlat() const { return nlat_; }
  int nlon() const { return nlon_; }
  int lmax() const { return lmax_; }
  int size() const { return nlat_ * nlon_; }

  const std::vector<double>& colatitudes() const { return colat_; }
  const std::vector<double>& cos_colatitudes() const { return cos_colat_; }
  const std::vector<double>& sin_colatitudes() const { return sin_colat_; }
  const std::vector<double>& longitudes() const { return lon_; }
  /// Gauss--Legendre weights in x = cos(theta); sum to 2.
  const std::vector<double>& latitude_weights() const { return lat_w_; }
  /// Extended-precision copies of the Gauss--Legendre nodes. Transform
  /// tables are built from these: sub-ulp node accuracy keeps the spectral
  /// Laplacian noise floor ~5x below what double-precision nodes allow.
  const std::vector<long double>& cos_colatitudes_ld() const { return cos_colat_ld_; }
  /// Per-node solid-angle weights; sum to 4 pi.
  double node_weight(int ilat) const { return lat_w_[ilat] * two_pi_over_nlon_; }

  int node_index(int ilat, int ilon) const { return ilat * nlon_ + ilon; }

  /// Unit direction vector of a node.
  void node_direction(int ilat, int ilon, double out[3]) const;

  bool same_layout(const SphericalGrid& o) const {
    return nlat_ == o.nlat_ && nlon_ == o.nlon_ && lmax_ == o.lmax_;
  }

 private:
  SphericalGrid(int nlat, int nlon, int lmax);

  int nlat_, nlon_, lmax_;
  double two_pi_over_nlon_;
  std::vector<double> colat_, cos_colat_, sin_colat_, lon_, lat_w_;
  std::vector<long double> cos_colat_ld_;
};

using GridPtr = std::shared_ptr<const SphericalGrid>;

}  // namespace nullcone
