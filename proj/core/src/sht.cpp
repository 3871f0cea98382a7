#include "nullcone/sht.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "nullcone/errors.hpp"

namespace nullcone {

//============================================================================
// SpectralCoeffs
//
// Packed layout, m-major:
//   block m = 0:      lmax+1 zonal coefficients            (l = 0..lmax)
//   block m >= 1:     2*(lmax+1-m) interleaved (cos, sin)  (l = m..lmax)
//============================================================================

SpectralCoeffs::SpectralCoeffs(int lmax) : lmax_(lmax) {
  if (lmax < 0) throw InvalidArgument("SpectralCoeffs: lmax must be >= 0");
  c_.assign((lmax + 1) * (lmax + 1), 0.0);
}

namespace {
inline int block_offset(int lmax, int m) {
  // Offset of the m-block. For m >= 1: (lmax+1) + sum_{k=1}^{m-1} 2(lmax+1-k).
  if (m == 0) return 0;
  return (lmax + 1) + 2 * ((m - 1) * (lmax + 1) - (m - 1) * m / 2);
}

inline int coeff_index(int lmax, int l, int m, int part) {
  if (m < 0 || m > l || l > lmax || part < 0 || part > 1 || (m == 0 && part == 1))
    throw InvalidArgument("SpectralCoeffs: index out of range");
  const int off = block_offset(lmax, m);
  return (m == 0) ? off + l : off + 2 * (l - m) + part;
}
}  // namespace

double& SpectralCoeffs::at(int l, int m, int part) {
  return c_[coeff_index(lmax_, l, m, part)];
}

double SpectralCoeffs::at(int l, int m, int part) const {
  return c_[coeff_index(lmax_, l, m, part)];
}

void SpectralCoeffs::scale_by_degree(const std::function<double(int)>& s) {
  for (int m = 0; m <= lmax_; ++m) {
    const int off = block_offset(lmax_, m);
    if (m == 0) {
      for (int l = 0; l <= lmax_; ++l) c_[off + l] *= s(l);
    } else {
      for (int l = m; l <= lmax_; ++l) {
        const double sl = s(l);
        c_[off + 2 * (l - m)] *= sl;
        c_[off + 2 * (l - m) + 1] *= sl;
      }
    }
  }
}

SpectralCoeffs SpectralCoeffs::truncated(int new_lmax) const {
  SpectralCoeffs out(new_lmax);
  const int lcap = std::min(lmax_, new_lmax);
  for (int m = 0; m <= lcap; ++m)
    for (int l = m; l <= lcap; ++l) {
      out.at(l, m, 0) = at(l, m, 0);
      if (m > 0) out.at(l, m, 1) = at(l, m, 1);
    }
  return out;
}

//============================================================================
// Sht
//============================================================================

namespace {

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Orthonormal associated-Legendre values Nbar_{lm} P_l^m(x) (no
// Condon--Shortley phase) for fixed x, all l in [m, lmax], one m at a time:
//   Ybar_{00} = 1/sqrt(4 pi)
//   Ybar_{m+1,m+1} = sqrt((2m+3)/(2m+2)) * sin(theta) * Ybar_{mm}
//   Ybar_{m+1,m}   = sqrt(2m+3) * x * Ybar_{mm}
//   Ybar_{lm} = a_lm x Ybar_{l-1,m} + b_lm Ybar_{l-2,m}
//   a_lm = sqrt((4l^2-1)/(l^2-m^2))
//   b_lm = -sqrt((2l+1)(l-1-m)(l-1+m)/((2l-3)(l^2-m^2)))
// The columns are evaluated in long double: the tables are built once and
// their accuracy bounds every later analysis/synthesis.
struct LegendreColumn {
  // values[l - m] = Ybar_{lm}(x) for current m
  std::vector<long double> values;

  void compute(int lmax, int m, long double x, long double sin_theta) {
    values.assign(lmax + 1 - m, 0.0L);
    long double pmm = 0.28209479177387814347403972578039L;  // 1/sqrt(4 pi)
    for (int k = 1; k <= m; ++k)
      pmm *= sin_theta * std::sqrt((2.0L * k + 1.0L) / (2.0L * k));
    values[0] = pmm;
    if (m == lmax) return;
    values[1] = std::sqrt(2.0L * m + 3.0L) * x * pmm;
    for (int l = m + 2; l <= lmax; ++l) {
      const long double l2 = static_cast<long double>(l) * l;
      const long double m2 = static_cast<long double>(m) * m;
      const long double a = std::sqrt((4.0L * l2 - 1.0L) / (l2 - m2));
      const long double b = -std::sqrt((2.0L * l + 1.0L) * (l - 1.0L - m) * (l - 1.0L + m) /
                                       ((2.0L * l - 3.0L) * (l2 - m2)));
      values[l - m] = a * x * values[l - m - 1] + b * values[l - m - 2];
    }
  }
};

}  // namespace

struct Sht::Impl {
  int nlat, nlon, lmax;
  int ncplx;  // nlon/2 + 1

  // Analysis layout: ana[m][(l-m)*nlat + i], contiguous in latitude.
  // Synthesis layout: syn[m][i*(lmax+1-m) + (l-m)], contiguous in degree.
  std::vector<std::vector<double>> ana, syn;

  fftw_plan plan_r2c = nullptr;
  fftw_plan plan_c2r = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    if (plan_r2c) fftw_destroy_plan(plan_r2c);
    if (plan_c2r) fftw_destroy_plan(plan_c2r);
  }
};

Sht::Sht(GridPtr grid) : grid_(std::move(grid)), impl_(new Impl) {
  if (!grid_) throw InvalidArgument("Sht: null grid");
  const auto& g = *grid_;
  impl_->nlat = g.nlat();
  impl_->nlon = g.nlon();
  impl_->lmax = g.lmax();
  impl_->ncplx = g.nlon() / 2 + 1;

  const int lmax = impl_->lmax;
  impl_->ana.resize(lmax + 1);
  impl_->syn.resize(lmax + 1);
  for (int m = 0; m <= lmax; ++m) {
    impl_->ana[m].assign(static_cast<size_t>(lmax + 1 - m) * g.nlat(), 0.0);
    impl_->syn[m].assign(static_cast<size_t>(lmax + 1 - m) * g.nlat(), 0.0);
  }
  LegendreColumn col;
  for (int i = 0; i < g.nlat(); ++i) {
    const long double x = g.cos_colatitudes_ld()[i];
    const long double s = std::sqrt((1.0L - x) * (1.0L + x));
    for (int m = 0; m <= lmax; ++m) {
      col.compute(lmax, m, x, s);
      for (int l = m; l <= lmax; ++l) {
        const double v = static_cast<double>(col.values[l - m]);
        impl_->ana[m][static_cast<size_t>(l - m) * g.nlat() + i] = v;
        impl_->syn[m][static_cast<size_t>(i) * (lmax + 1 - m) + (l - m)] = v;
      }
    }
  }

  // FFTW_UNALIGNED lets us run the plans on ordinary std::vector buffers via
  // the new-array interface; FFTW_ESTIMATE keeps plan selection (and hence
  // output bits) independent of machine load.
  std::lock_guard<std::mutex> lock(fftw_plan_mutex());
  std::vector<double> rbuf(g.nlon());
  std::vector<std::complex<double>> cbuf(impl_->ncplx);
  impl_->plan_r2c =
      fftw_plan_dft_r2c_1d(g.nlon(), rbuf.data(), reinterpret_cast<fftw_complex*>(cbuf.data()),
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  impl_->plan_c2r =
      fftw_plan_dft_c2r_1d(g.nlon(), reinterpret_cast<fftw_complex*>(cbuf.data()), rbuf.data(),
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!impl_->plan_r2c || !impl_->plan_c2r) throw Error("Sht: FFTW plan creation failed");
}

Sht::~Sht() = default;

SpectralCoeffs Sht::analyze(const ScalarField& f) const {
  if (!f.grid().same_layout(*grid_))
    throw InvalidArgument("Sht::analyze: field grid does not match transform grid");
  const auto& g = *grid_;
  const int nlat = g.nlat(), nlon = g.nlon(), lmax = g.lmax();

  // Longitude stage: per-row Fourier coefficients, premultiplied by the
  // latitude quadrature weight. fc[m][i] holds w_i * C_m(theta_i) with the
  // cos part at [0], sin at [1] (interleaved complex storage).
  std::vector<double> rbuf(nlon);
  std::vector<std::complex<double>> cbuf(impl_->ncplx);
  std::vector<double> fc(static_cast<size_t>(lmax + 1) * nlat * 2);
  const double lon_scale = 2.0 / nlon;
  for (int i = 0; i < nlat; ++i) {
    const double* row = f.values().data() + static_cast<size_t>(i) * nlon;
    std::copy(row, row + nlon, rbuf.begin());
    fftw_execute_dft_r2c(impl_->plan_r2c, rbuf.data(),
                         reinterpret_cast<fftw_complex*>(cbuf.data()));
    const double w = g.latitude_weights()[i];
    fc[static_cast<size_t>(0) * nlat * 2 + 2 * i] = w * cbuf[0].real() / nlon;
    for (int m = 1; m <= lmax; ++m) {
      fc[static_cast<size_t>(m) * nlat * 2 + 2 * i] = w * lon_scale * cbuf[m].real();
      fc[static_cast<size_t>(m) * nlat * 2 + 2 * i + 1] = -w * lon_scale * cbuf[m].imag();
    }
  }

  // Latitude stage: contract against the orthonormal Legendre tables.
  // Orthonormality of the theta-part carries a 1/(2 pi) (m = 0) or
  // 1/(sqrt(2) pi) (m >= 1, real pair) conversion into coefficients.
  SpectralCoeffs out(lmax);
  double* oc = out.raw().data();
  const double two_pi = 2.0 * std::numbers::pi;
  const double rt2_pi = std::numbers::sqrt2 * std::numbers::pi;
  {
    const double* tbl = impl_->ana[0].data();
    const double* c0 = &fc[0];
    for (int l = 0; l <= lmax; ++l) {
      double acc = 0.0;
      const double* trow = tbl + static_cast<size_t>(l) * nlat;
      for (int i = 0; i < nlat; ++i) acc += trow[i] * c0[2 * i];
      oc[l] = two_pi * acc;
    }
  }
  for (int m = 1; m <= lmax; ++m) {
    const double* tbl = impl_->ana[m].data();
    const double* cm = &fc[static_cast<size_t>(m) * nlat * 2];
    double* blk = oc + block_offset(lmax, m);
    for (int l = m; l <= lmax; ++l) {
      double ac = 0.0, as = 0.0;
      const double* trow = tbl + static_cast<size_t>(l - m) * nlat;
      for (int i = 0; i < nlat; ++i) {
        ac += trow[i] * cm[2 * i];
        as += trow[i] * cm[2 * i + 1];
      }
      blk[2 * (l - m)] = rt2_pi * ac;
      blk[2 * (l - m) + 1] = rt2_pi * as;
    }
  }
  return out;
}

ScalarField Sht::synthesize(const SpectralCoeffs& c) const {
  const auto& g = *grid_;
  const int nlat = g.nlat(), nlon = g.nlon(), lmax = g.lmax();
  const int clmax = c.lmax();
  if (clmax > lmax)
    throw InvalidArgument("Sht::synthesize: coefficient lmax exceeds grid lmax");

  ScalarField out(grid_);
  std::vector<double> rbuf(nlon);
  std::vector<std::complex<double>> cbuf(impl_->ncplx);
  const double inv_rt2 = 1.0 / std::numbers::sqrt2;
  const double* cc = c.raw().data();

  for (int i = 0; i < nlat; ++i) {
    std::fill(cbuf.begin(), cbuf.end(), std::complex<double>(0.0, 0.0));
    {
      const double* tbl = impl_->syn[0].data() + static_cast<size_t>(i) * (lmax + 1);
      double acc = 0.0;
      for (int l = 0; l <= clmax; ++l) acc += tbl[l] * cc[l];
      cbuf[0] = std::complex<double>(acc, 0.0);
    }
    for (int m = 1; m <= clmax; ++m) {
      const double* tbl = impl_->syn[m].data() + static_cast<size_t>(i) * (lmax + 1 - m);
      const double* blk = cc + block_offset(clmax, m);
      double ac = 0.0, as = 0.0;
      for (int l = m; l <= clmax; ++l) {
        ac += tbl[l - m] * blk[2 * (l - m)];
        as += tbl[l - m] * blk[2 * (l - m) + 1];
      }
      // C_m = sqrt(2) sum_l a^c Ybar; halfcomplex packing H_m = (C_m - i S_m)/2.
      cbuf[m] = std::complex<double>(inv_rt2 * ac, -inv_rt2 * as);
    }
    fftw_execute_dft_c2r(impl_->plan_c2r, reinterpret_cast<fftw_complex*>(cbuf.data()),
                         rbuf.data());
    std::copy(rbuf.begin(), rbuf.end(),
              out.values().begin() + static_cast<size_t>(i) * nlon);
  }
  return out;
}

SpectralCoeffs Sht::laplacian_coeffs(const SpectralCoeffs& c) const {
  SpectralCoeffs out = c;
  out.scale_by_degree([](int l) { return -static_cast<double>(l) * (l + 1); });
  return out;
}

ScalarField Sht::laplacian(const ScalarField& f) const {
  return synthesize(laplacian_coeffs(analyze(f)));
}

double Sht::evaluate(const SpectralCoeffs& c, double theta, double phi) const {
  const int clmax = c.lmax();
  LegendreColumn col;
  const long double x = std::cos(static_cast<long double>(theta));
  const long double s = std::sin(static_cast<long double>(theta));
  const double* cc = c.raw().data();
  double total = 0.0;
  const double rt2 = std::numbers::sqrt2;
  for (int m = 0; m <= clmax; ++m) {
    col.compute(clmax, m, x, s);
    double ac = 0.0, as = 0.0;
    if (m == 0) {
      for (int l = 0; l <= clmax; ++l) ac += static_cast<double>(col.values[l]) * cc[l];
      total += ac;
    } else {
      const double* blk = cc + block_offset(clmax, m);
      for (int l = m; l <= clmax; ++l) {
        const double y = static_cast<double>(col.values[l - m]);
        ac += y * blk[2 * (l - m)];
        as += y * blk[2 * (l - m) + 1];
      }
      total += rt2 * (ac * std::cos(m * phi) + as * std::sin(m * phi));
    }
  }
  return total;
}

}  // namespace nullcone
