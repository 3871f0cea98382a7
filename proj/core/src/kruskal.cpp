#include "nullcone/kruskal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <gsl/gsl_interp.h>
#include <gsl/gsl_spline.h>

#include "nullcone/errors.hpp"
#include "nullcone/numerics.hpp"

namespace nullcone {

namespace {

// Fourth-order centered derivative; step scaled to the abscissa.
double fd_derivative(const std::function<double(double)>& f, double x) {
  const double h = 1e-4 * std::max(1.0, std::abs(x));
  return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Ternary search for the minimizer of f on [lo, hi] (f unimodal there).
double ternary_min(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return 0.5 * (lo + hi);
}

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::vector<HorizonInfo> find_horizons(const std::function<double(double)>& h, double r_lo,
                                       double r_hi, int scan_samples) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) {
    throw InvalidArgument("find_horizons: need 0 < r_lo < r_hi");
  }
  if (scan_samples < 16) throw InvalidArgument("find_horizons: scan too coarse");

  const int n = scan_samples;
  std::vector<double> x(n + 1), v(n + 1);
  for (int j = 0; j <= n; ++j) {
    x[j] = r_lo + (r_hi - r_lo) * j / n;
    v[j] = h(x[j]);
    if (!std::isfinite(v[j])) throw DomainError("find_horizons: h not finite on the bracket");
  }

  std::vector<HorizonInfo> out;
  std::vector<std::pair<int, int>> crossing_cells;
  for (int j = 0; j < n; ++j) {
    double root = std::numeric_limits<double>::quiet_NaN();
    if (v[j] == 0.0) {
      root = x[j];
    } else if ((v[j] < 0.0) != (v[j + 1] < 0.0)) {
      root = bisect_root(h, x[j], x[j + 1], v[j]);
    } else {
      continue;
    }
    crossing_cells.emplace_back(j - 1, j + 2);
    for (int it = 0; it < 4; ++it) {  // Newton polish on the bisection result
      const double d = fd_derivative(h, root);
      if (d == 0.0) break;
      const double next = root - h(root) / d;
      if (next > x[std::max(0, j - 1)] && next < x[std::min(n, j + 2)]) root = next;
    }
    const double slope = fd_derivative(h, root);
    if (std::abs(slope) < 1e-8) {
      throw DomainError("find_horizons: degenerate horizon near r = " + std::to_string(root) +
                        " (h' vanishes)");
    }
    if (std::abs(h(root)) > 1e-12) {
      throw DomainError("find_horizons: root polish failed near r = " + std::to_string(root));
    }
    HorizonInfo info;
    info.radius = root;
    info.slope_inverse = 1.0 / slope;
    out.push_back(info);
  }

  // A local minimum of h^2 that approaches zero without a sign change is a
  // degenerate (touching) horizon: refine and reject it.
  auto h2 = [&](double r) {
    const double val = h(r);
    return val * val;
  };
  for (int j = 1; j < n; ++j) {
    if (!(std::abs(v[j]) < 1e-3)) continue;
    if (!(v[j] * v[j] <= v[j - 1] * v[j - 1] && v[j] * v[j] <= v[j + 1] * v[j + 1])) continue;
    bool near_crossing = false;
    for (const auto& cell : crossing_cells) {
      if (j >= cell.first && j <= cell.second) near_crossing = true;
    }
    if (near_crossing) continue;
    const double rmin = ternary_min(h2, x[j - 1], x[j + 1]);
    if (std::abs(h(rmin)) < 1e-10) {
      throw DomainError("find_horizons: degenerate horizon near r = " + std::to_string(rmin) +
                        " (h touches zero without crossing)");
    }
  }
  return out;
}

ClassSModel ClassSModel::create(std::function<double(double)> h, double r_lo, double r_hi) {
  ClassSModel m;
  m.h = std::move(h);
  m.r_lo = r_lo;
  m.r_hi = r_hi;
  m.horizons = find_horizons(m.h, r_lo, r_hi);
  return m;
}

ClassSModel ClassSModel::de_sitter(double r_lo, double r_hi) {
  return create([](double r) { return 1.0 - r * r; }, r_lo, r_hi);
}

//----------------------------------------------------------------------------
// Chart construction
//----------------------------------------------------------------------------

namespace {
struct SplineDeleter {
  void operator()(gsl_spline* s) const { gsl_spline_free(s); }
};
using SplinePtr = std::unique_ptr<gsl_spline, SplineDeleter>;

SplinePtr make_steffen(const std::vector<double>& x, const std::vector<double>& y) {
  SplinePtr s(gsl_spline_alloc(gsl_interp_steffen, x.size()));
  if (!s) throw Error("kruskal: spline allocation failed");
  if (gsl_spline_init(s.get(), x.data(), y.data(), x.size()) != 0) {
    throw Error("kruskal: spline initialization failed");
  }
  return s;
}

// Stateless (thread-safe) spline evaluation: a stack accelerator per call.
double spline_eval(const gsl_spline* s, double x) {
  gsl_interp_accel acc = {0, 0, 0};
  return gsl_spline_eval(s, x, &acc);
}

// Divide a Chebyshev series with a root at x0 by (x - x0), dropping the
// eps-level remainder (synthetic deflation in the T_k basis, run in extended
// precision). This turns the removable singularity of (1 - K chi)/(r - r_i)
// at the chart's own horizon into exact coefficient algebra, so the
// regular-part samples carry no 1/distance rounding noise.
ChebyshevSeries divide_out_root(const ChebyshevSeries& d, double x0) {
  const auto& dc = d.coeffs();
  const int n = static_cast<int>(dc.size()) - 1;
  if (n < 1) return ChebyshevSeries(d.a(), d.b(), {0.0});
  const long double t0 =
      (2.0L * static_cast<long double>(x0) - d.a() - d.b()) / (d.b() - d.a());
  std::vector<long double> q(static_cast<size_t>(n) + 2, 0.0L);  // q[n] = q[n+1] = 0
  for (int k = n - 1; k >= 1; --k) {
    q[static_cast<size_t>(k)] = 2.0L * dc[static_cast<size_t>(k) + 1] +
                                2.0L * t0 * q[static_cast<size_t>(k) + 1] -
                                q[static_cast<size_t>(k) + 2];
  }
  q[0] = dc[1] + t0 * q[1] - 0.5L * q[2];
  std::vector<double> out(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<size_t>(k)] = static_cast<double>(q[static_cast<size_t>(k)]);
  return ChebyshevSeries(d.a(), d.b(), std::move(out));
}

// Clenshaw evaluation in extended precision. The regular-part series can
// carry coefficients of magnitude ~10^3 near a neighboring horizon, and
// f'(r) forms 1 + (r - r_i) psi/r, which cancels to ~10^-2 at the far edge
// of the domain; double-precision Clenshaw noise there would be amplified
// above the chart's accuracy target.
double eval_ld(const ChebyshevSeries& series, double x) {
  const auto& c = series.coeffs();
  const long double t =
      (2.0L * static_cast<long double>(x) - series.a() - series.b()) / (series.b() - series.a());
  long double bk1 = 0.0L, bk2 = 0.0L;
  for (int j = static_cast<int>(c.size()) - 1; j >= 1; --j) {
    const long double bk = 2.0L * t * bk1 - bk2 + c[static_cast<size_t>(j)];
    bk2 = bk1;
    bk1 = bk;
  }
  return static_cast<double>(t * bk1 - bk2 + c[0]);
}
}  // namespace

struct KruskalChart::Impl {
  double r_horizon = 0.0;
  double k = 0.0;   // K = 1/h'(r_i), from the regularized-profile fit
  double c = 1.0;   // lightcone constant
  double lo = 0.0, hi = 0.0;
  ChebyshevSeries g;    // G(ln r): exponent of the pole-free factor of f
  ChebyshevSeries psi;  // G' in the log-radius variable, neighbor poles removed
  std::vector<double> nb_r;  // neighboring horizon radii
  std::vector<double> nb_e;  // their exponents K_j / K in f
  std::vector<double> nb_d;  // r_horizon - r_j, normalizing each power to 1 at r_i
  std::vector<double> tab_r, tab_f;
  SplinePtr inverse;  // monotone seed for rho(uv)

  // exp(G(ln r)) times the exact neighbor-horizon powers ((r-r_j)/(r_i-r_j))^{K_j/K};
  // equals f/(r - r_i), and is the common factor of f and f', so it cancels
  // exactly from f/f'.
  double regular_part(double r) const {
    double lg = eval_ld(g, std::log(r));
    for (size_t j = 0; j < nb_r.size(); ++j) {
      lg += nb_e[j] * std::log((r - nb_r[j]) / nb_d[j]);
    }
    return std::exp(lg);
  }

  double f_at(double r) const { return (r - r_horizon) * regular_part(r); }

  double fp_at(double r) const {
    double tail = eval_ld(psi, std::log(r)) / r;
    for (size_t j = 0; j < nb_r.size(); ++j) tail += nb_e[j] / (r - nb_r[j]);
    return regular_part(r) * (1.0 + (r - r_horizon) * tail);
  }

  void require_radius(double r) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(hi));
    if (!(r >= lo - slack && r <= hi + slack)) {
      throw DomainError("KruskalChart: radius " + std::to_string(r) +
                        " outside the chart domain [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
  }
};

KruskalChart::KruskalChart() : impl_(std::make_unique<Impl>()) {}
KruskalChart::~KruskalChart() = default;
KruskalChart::KruskalChart(KruskalChart&&) noexcept = default;
KruskalChart& KruskalChart::operator=(KruskalChart&&) noexcept = default;

double KruskalChart::horizon_radius() const { return impl_->r_horizon; }
double KruskalChart::surface_gravity_inverse() const { return impl_->k; }
double KruskalChart::lightcone_constant() const { return impl_->c; }
double KruskalChart::r_lo() const { return impl_->lo; }
double KruskalChart::r_hi() const { return impl_->hi; }

double KruskalChart::f(double r) const {
  impl_->require_radius(r);
  return impl_->f_at(r);
}

double KruskalChart::f_prime(double r) const {
  impl_->require_radius(r);
  return impl_->fp_at(r);
}

double KruskalChart::F(double r) const {
  impl_->require_radius(r);
  return 2.0 * impl_->k / impl_->fp_at(r);
}

double KruskalChart::rho(double uv) const {
  const Impl& im = *impl_;
  const double f_lo = im.tab_f.front();
  const double f_hi = im.tab_f.back();
  // The tabulation endpoints sit at exp(log(r)) of the domain ends, which can
  // round one ulp inside; accept uv at the nominal ends and clamp.
  const double slack = 1e-9 * std::max({1.0, std::abs(f_lo), std::abs(f_hi)});
  if (!(uv >= f_lo - slack && uv <= f_hi + slack)) {
    throw DomainError("KruskalChart::rho: u v = " + std::to_string(uv) +
                      " outside the chart range [" + std::to_string(f_lo) + ", " +
                      std::to_string(f_hi) + "]");
  }
  const double uv_in = std::clamp(uv, f_lo, f_hi);
  double r = spline_eval(im.inverse.get(), uv_in);
  double blo = im.lo, bhi = im.hi;
  const double tol = 1e-14 * std::max(1.0, std::abs(uv_in));
  for (int it = 0; it < 100; ++it) {
    const double res = im.f_at(r) - uv_in;
    if (std::abs(res) <= tol) return r;
    if (res > 0.0) {
      bhi = r;
    } else {
      blo = r;
    }
    const double step = res / im.fp_at(r);
    double next = r - step;
    if (!(next > blo && next < bhi)) next = 0.5 * (blo + bhi);  // keep the bracket
    r = next;
  }
  return r;
}

KruskalChart::Metric KruskalChart::metric_components(double u, double v) const {
  Metric m;
  m.radius = rho(u * v);
  m.guv = 2.0 * impl_->k / impl_->fp_at(m.radius);
  return m;
}

std::vector<std::pair<double, double>> KruskalChart::embed_cross_section(
    const ConformalFactor& w) const {
  const Impl& im = *impl_;
  const auto& om = w.omega();
  std::vector<std::pair<double, double>> out;
  out.reserve(om.size());
  for (int i = 0; i < om.size(); ++i) {
    im.require_radius(om[i]);
    out.emplace_back(im.f_at(om[i]) / im.c, im.c);
  }
  return out;
}

void KruskalChart::write_csv(std::ostream& os, int samples) const {
  if (samples < 2) throw InvalidArgument("KruskalChart::write_csv: need at least two samples");
  const Impl& im = *impl_;
  std::string out;
  out.reserve(static_cast<size_t>(samples) * 80 + 32);
  out += "r,f,f_prime,F\n";
  for (int j = 0; j < samples; ++j) {
    const double r = im.lo + (im.hi - im.lo) * j / (samples - 1);
    const double fp = im.fp_at(r);
    append_g17(out, r);
    out += ',';
    append_g17(out, im.f_at(r));
    out += ',';
    append_g17(out, fp);
    out += ',';
    append_g17(out, 2.0 * im.k / fp);
    out += '\n';
  }
  os << out;
}

KruskalChart solve_f(const ClassSModel& model, int horizon_index, double lightcone_constant) {
  if (horizon_index < 0 || horizon_index >= static_cast<int>(model.horizons.size())) {
    throw InvalidArgument("solve_f: horizon index out of range");
  }
  if (!(lightcone_constant > 0.0) || !std::isfinite(lightcone_constant)) {
    throw InvalidArgument("solve_f: lightcone constant must be positive");
  }
  const double ri = model.horizons[horizon_index].radius;

  // Stay a safe margin short of neighboring horizons, where 1/h blows up.
  double lo = model.r_lo, hi = model.r_hi;
  if (horizon_index > 0) {
    const double prev = model.horizons[horizon_index - 1].radius;
    lo = std::max(lo, prev + 0.02 * (ri - prev));
  }
  if (horizon_index + 1 < static_cast<int>(model.horizons.size())) {
    const double next = model.horizons[horizon_index + 1].radius;
    hi = std::min(hi, next - 0.02 * (next - ri));
  }

  const double sa = std::log(lo), sb = std::log(hi), si = std::log(ri);

  // chi(r) = h(r)/(r - r_i) carries the horizon's simple zero away and keeps
  // a uniform sign on the chart domain; any other zero of h would be a zero
  // of chi, through which the ODE has no increasing solution, so refuse to
  // build the chart in that case. The sign check is done on direct samples.
  const double guard = 1e-9 * std::max(1.0, ri);
  auto chi_direct = [&](double s) {
    double r = std::exp(s);
    double d = r - ri;
    if (std::abs(d) < guard) {
      d = (d < 0.0) ? -guard : guard;
      r = ri + d;
    }
    return model.h(r) / d;
  };
  double abs_min = std::numeric_limits<double>::infinity();
  double abs_max = 0.0;
  bool sign_flip = false;
  const double sgn = (model.horizons[horizon_index].slope_inverse > 0.0) ? 1.0 : -1.0;
  for (int j = 0; j <= 1024; ++j) {
    const double val = chi_direct(sa + (sb - sa) * j / 1024.0);
    if (!(sgn * val > 0.0)) sign_flip = true;
    abs_min = std::min(abs_min, std::abs(val));
    abs_max = std::max(abs_max, std::abs(val));
  }
  if (sign_flip || !(abs_min > 1e-8 * abs_max)) {
    throw DomainError("solve_f: h vanishes inside the chart domain away from the horizon");
  }

  // chi spans several orders of magnitude when the domain approaches another
  // horizon, so fit its logarithm: lambda = ln|chi| has O(1) amplitude and
  // gives chi full relative accuracy everywhere. K = 1/chi(r_i) follows
  // spectrally, with the sign taken from the horizon slope.
  auto lambda_cb = [&](double s) { return std::log(std::abs(chi_direct(s))); };
  const ChebyshevSeries lambda = ChebyshevSeries::fit(lambda_cb, sa, sb, 1e-15);
  const double lambda_si = eval_ld(lambda, si);
  const double k = sgn * std::exp(-lambda_si);
  if (!std::isfinite(k)) throw DomainError("solve_f: horizon slope not resolvable");

  // 1/(K h) = 1/(r - r_i) + sum_j (K_j/K)/(r - r_j) + psi(r) with psi
  // regular: the chart's own simple zero and every neighboring horizon's
  // pole are peeled off analytically, so psi stays O(1) even when the
  // domain margin sits close to another horizon. G integrates psi in
  // log-radius; f = (r - r_i) prod_j ((r-r_j)/(r_i-r_j))^{K_j/K} e^G with
  // G(ln r_i) = 0 pins f'(r_i) = 1 exactly.
  std::vector<double> nb_r, nb_e, nb_d;
  for (int j = 0; j < static_cast<int>(model.horizons.size()); ++j) {
    if (j == horizon_index) continue;
    nb_r.push_back(model.horizons[j].radius);
    nb_e.push_back(model.horizons[j].slope_inverse / k);
    nb_d.push_back(ri - model.horizons[j].radius);
  }
  // With dl(s) = lambda(s) - lambda(s_i), K chi = e^{dl} exactly, so
  //   psi = (r/(r - r_i)) (1/(K chi) - 1) = -(r/r_i) E(dl) mu(s) t_scale / X(x),
  // where E(y) = expm1(-y)/(-y), X(x) = expm1(x)/x, x = s - s_i, and
  // mu = dl/(t - t_i) is the deflated quotient. Every factor is evaluated
  // without cancellation, which keeps the sample noise at machine level and
  // lets the fit run at full precision.
  std::vector<double> dl_coeffs = lambda.coeffs();
  dl_coeffs[0] -= lambda_si;
  const ChebyshevSeries mu = divide_out_root(ChebyshevSeries(sa, sb, std::move(dl_coeffs)), si);
  const double t_scale = 2.0 / (sb - sa);
  auto expm1_ratio = [](double y) {  // expm1(y)/y, smooth through y = 0
    return (std::abs(y) < 1e-8) ? 1.0 + 0.5 * y : std::expm1(y) / y;
  };
  auto psi_cb = [&](double s) {
    const double r = std::exp(s);
    const double x = s - si;
    const double dl = eval_ld(lambda, s) - lambda_si;
    const double e_factor = expm1_ratio(-dl);
    const double x_factor = expm1_ratio(x);
    double val = -(r / ri) * e_factor * t_scale * eval_ld(mu, s) / x_factor;
    for (size_t j = 0; j < nb_r.size(); ++j) val -= nb_e[j] * r / (r - nb_r[j]);
    return val;
  };
  const ChebyshevSeries psi = ChebyshevSeries::fit(psi_cb, sa, sb, 3e-15);

  KruskalChart chart;
  KruskalChart::Impl& im = *chart.impl_;
  im.r_horizon = ri;
  im.k = k;
  im.c = lightcone_constant;
  im.lo = lo;
  im.hi = hi;
  im.psi = psi;
  im.g = psi.antiderivative(si);
  im.nb_r = std::move(nb_r);
  im.nb_e = std::move(nb_e);
  im.nb_d = std::move(nb_d);

  const int n_tab = 800;
  im.tab_r.resize(n_tab + 1);
  im.tab_f.resize(n_tab + 1);
  for (int j = 0; j <= n_tab; ++j) {
    const double s = sa + (sb - sa) * j / n_tab;
    im.tab_r[j] = std::exp(s);
    im.tab_f[j] = im.f_at(im.tab_r[j]);
    if (j > 0 && !(im.tab_f[j] > im.tab_f[j - 1])) {
      throw IntegratorError("solve_f: constructed f is not strictly increasing");
    }
  }
  im.inverse = make_steffen(im.tab_f, im.tab_r);
  return chart;
}

//----------------------------------------------------------------------------
// Background foliation and pseudosphere embeddings
//----------------------------------------------------------------------------

BackgroundLeaf background_leaf(const ClassSModel& model, double r) {
  if (!(r >= model.r_lo && r <= model.r_hi)) {
    throw DomainError("background_leaf: r outside the model bracket");
  }
  BackgroundLeaf leaf;
  leaf.gamma_coeff = r * r;
  leaf.chi_bar_coeff = r;
  leaf.chi_coeff = r * model.h(r);
  leaf.zeta = 0.0;
  return leaf;
}

std::array<double, 5> pseudosphere_embed(PseudospherePatch patch, double t, double r,
                                         const std::array<double, 3>& x) {
  const bool is_static =
      patch == PseudospherePatch::StaticPlus || patch == PseudospherePatch::StaticMinus;
  const bool plus =
      patch == PseudospherePatch::StaticPlus || patch == PseudospherePatch::CosmologicalPlus;
  if (is_static) {
    if (!(r > 0.0 && r < 1.0)) {
      throw DomainError("pseudosphere_embed: static patches need r in (0, 1)");
    }
    const double a = (plus ? 1.0 : -1.0) * std::sqrt(1.0 - r * r);
    return {a * std::sinh(t), a * std::cosh(t), r * x[0], r * x[1], r * x[2]};
  }
  if (!(r > 1.0)) {
    throw DomainError("pseudosphere_embed: cosmological patches need r > 1");
  }
  const double a = (plus ? 1.0 : -1.0) * std::sqrt(r * r - 1.0);
  return {a * std::cosh(t), a * std::sinh(t), r * x[0], r * x[1], r * x[2]};
}

double minkowski5_inner(const std::array<double, 5>& a, const std::array<double, 5>& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4];
}

}  // namespace nullcone
