// Double-null extension charts: horizon finding, the extension ODE against a
// symbolic antiderivative, inverse/embedding contracts, a nested
// finite-difference Riemann-tensor probe of the chart metric, background-leaf
// identities, and the pseudosphere embeddings. The de Sitter oracle
// f(r) = 2(r-1)/(r+1) is derived test-side from -2 int dr/(1-r^2) with unit
// slope at the horizon; the chart code never sees it.
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nullcone/errors.hpp"
#include "nullcone/exact.hpp"
#include "nullcone/kruskal.hpp"
#include "nullcone/sht.hpp"

using namespace nullcone;

namespace {

double h_rn(double r) { return 1.0 - 2.0 / r + 0.64 / (r * r); }  // roots 0.4 and 1.6

double ds_f_oracle(double r) { return 2.0 * (r - 1.0) / (r + 1.0); }

// Fourth-order first derivative of a scalar callback.
double fd1(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

// Chart metric g = F(rho)(du dv + dv du) + rho^2 dOmega^2 in (u, v, theta, phi).
Mat4 chart_metric(const KruskalChart& chart, const Vec4& x) {
  const auto mc = chart.metric_components(x[0], x[1]);
  Mat4 g{};
  g[0][1] = g[1][0] = mc.guv;
  g[2][2] = mc.radius * mc.radius;
  g[3][3] = mc.radius * mc.radius * std::sin(x[2]) * std::sin(x[2]);
  return g;
}

Mat4 chart_metric_inverse(const Mat4& g) {
  Mat4 inv{};
  inv[0][1] = inv[1][0] = 1.0 / g[0][1];
  inv[2][2] = 1.0 / g[2][2];
  inv[3][3] = 1.0 / g[3][3];
  return inv;
}

Mat4 metric_coordinate_derivative(const KruskalChart& chart, Vec4 x, int c, double h) {
  Mat4 out{};
  const std::array<double, 4> w = {1.0, -8.0, 8.0, -1.0};
  const std::array<double, 4> off = {-2.0 * h, -h, h, 2.0 * h};
  for (int s = 0; s < 4; ++s) {
    Vec4 xs = x;
    xs[c] += off[s];
    const Mat4 g = chart_metric(chart, xs);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out[a][b] += w[s] * g[a][b] / (12.0 * h);
  }
  return out;
}

// Christoffel symbols Gamma^a_{bc} from centered differences of the metric.
std::array<Mat4, 4> christoffels(const KruskalChart& chart, const Vec4& x, double h) {
  const Mat4 g = chart_metric(chart, x);
  const Mat4 ginv = chart_metric_inverse(g);
  std::array<Mat4, 4> dg;  // dg[c][a][b] = d_c g_ab
  for (int c = 0; c < 4; ++c) dg[c] = metric_coordinate_derivative(chart, x, c, h);
  std::array<Mat4, 4> gam{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double sum = 0.0;
        for (int d = 0; d < 4; ++d)
          sum += ginv[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
        gam[a][b][c] = 0.5 * sum;
      }
  return gam;
}

}  // namespace

TEST_SUITE("kruskal") {

TEST_CASE("horizon finding: simple zeros with their inverse slopes") {
  auto ds = find_horizons([](double r) { return 1.0 - r * r; }, 0.02, 2.0);
  REQUIRE(ds.size() == 1);
  CHECK(std::abs(ds[0].radius - 1.0) < 1e-12);
  CHECK(std::abs(ds[0].slope_inverse - (-0.5)) < 1e-10);

  CHECK(find_horizons([](double r) { return 1.0 + r * r; }, 0.02, 5.0).empty());

  auto rn = find_horizons(h_rn, 0.05, 3.0);
  REQUIRE(rn.size() == 2);
  CHECK(std::abs(rn[0].radius - 0.4) < 1e-12);
  CHECK(std::abs(rn[0].slope_inverse - (-2.0 / 15.0)) < 1e-10);
  CHECK(std::abs(rn[1].radius - 1.6) < 1e-12);
  CHECK(std::abs(rn[1].slope_inverse - (32.0 / 15.0)) < 1e-10);

  // A touching zero has no one-sided extension: reject it.
  CHECK_THROWS_AS((void)find_horizons([](double r) { return (1.0 - r) * (1.0 - r); }, 0.02, 2.0),
                  DomainError);
  CHECK_THROWS_AS((void)find_horizons([](double r) { return 1.0 - r; }, -1.0, 2.0),
                  InvalidArgument);
}

TEST_CASE("de Sitter chart matches the symbolic antiderivative") {
  auto model = ClassSModel::de_sitter();
  REQUIRE(model.horizons.size() == 1);
  auto chart = solve_f(model, 0);
  CHECK(std::abs(chart.surface_gravity_inverse() - (-0.5)) < 1e-12);
  CHECK(std::abs(chart.horizon_radius() - 1.0) < 1e-12);
  CHECK(std::abs(chart.f(1.0)) < 1e-14);
  CHECK(std::abs(chart.f_prime(1.0) - 1.0) < 1e-13);
  CHECK(std::abs(chart.F(1.0) - 2.0 * chart.surface_gravity_inverse()) < 1e-12);

  for (int j = 0; j <= 500; ++j) {
    const double r = 0.02 + (3.0 - 0.02) * j / 500.0;
    CHECK(std::abs(chart.f(r) - ds_f_oracle(r)) < 1e-9);
    // f' and F against the derivative of the oracle, F = 2K/f'.
    const double fp_oracle = 4.0 / ((r + 1.0) * (r + 1.0));
    CHECK(std::abs(chart.f_prime(r) - fp_oracle) < 1e-9);
    CHECK(std::abs(chart.F(r) - (-(r + 1.0) * (r + 1.0) / 4.0)) < 1e-8);
  }
}

TEST_CASE("extension ODE residual and inverse contract on every chart") {
  auto ds = ClassSModel::de_sitter();
  auto rn = ClassSModel::create(h_rn, 0.05, 3.0);
  struct Item {
    const ClassSModel* model;
    int index;
  };
  const Item items[] = {{&ds, 0}, {&rn, 0}, {&rn, 1}};
  for (const auto& item : items) {
    auto chart = solve_f(*item.model, item.index);
    const double k = chart.surface_gravity_inverse();
    const double lo = chart.r_lo(), hi = chart.r_hi();
    double prev_f = -1e300;
    for (int j = 0; j <= 500; ++j) {
      const double r = lo + (hi - lo) * j / 500.0;
      const double fv = chart.f(r);
      const double fp = chart.f_prime(r);
      CHECK(fv > prev_f);  // strictly increasing
      prev_f = fv;
      CHECK(std::abs(fv / fp - k * item.model->h(r)) < 1e-9);
      CHECK(std::abs(chart.rho(fv) - r) < 1e-10);
      // The closed-form derivative agrees with differencing f itself.
      if (j % 25 == 0 && r > lo + 1e-2 && r < hi - 1e-2) {
        const double fd = fd1([&](double q) { return chart.f(q); }, r, 1e-5);
        CHECK(std::abs(fd - fp) < 1e-8 * std::max(1.0, std::abs(fp)));
      }
    }
    CHECK(std::abs(chart.f(chart.horizon_radius())) < 1e-14);
    CHECK(std::abs(chart.f_prime(chart.horizon_radius()) - 1.0) < 1e-13);
  }
}

TEST_CASE("conformal coefficient is finite and smooth across the horizon") {
  auto rn = ClassSModel::create(h_rn, 0.05, 3.0);
  for (int index : {0, 1}) {
    auto chart = solve_f(rn, index);
    const double k = chart.surface_gravity_inverse();
    CHECK(std::abs(chart.metric_components(0.7, 0.0).radius - chart.horizon_radius()) < 1e-12);
    CHECK(std::abs(chart.metric_components(0.0, -0.3).guv - 2.0 * k) < 1e-12);
    // F(rho(uv)) straddling uv = 0: finite values, and a second difference
    // that converges under step refinement, i.e. genuinely C^2 through the
    // horizon rather than merely bounded.
    const double d = 1e-3;
    for (double uv : {-2.0 * d, -d, 0.0, d, 2.0 * d}) {
      const double Fv = chart.F(chart.rho(uv));
      CHECK(std::isfinite(Fv));
    }
    auto Fuv = [&](double uv) { return chart.F(chart.rho(uv)); };
    auto second = [&](double step) {
      return (Fuv(step) - 2.0 * Fuv(0.0) + Fuv(-step)) / (step * step);
    };
    const double s1 = second(d), s2 = second(2.0 * d);
    CHECK(std::isfinite(s1));
    CHECK(std::abs(s1 - s2) < 1e-2 * std::max(1.0, std::abs(s1)));
  }
}

TEST_CASE("chart metric passes the constant-curvature Riemann identity") {
  auto chart = solve_f(ClassSModel::de_sitter(), 0);
  std::mt19937_64 rng(20240815u);
  std::uniform_real_distribution<double> rad(0.25, 2.75), uu(0.3, 1.2), th(0.5, 2.6);
  const double h = 1e-3;
  double worst = 0.0;
  for (int pt = 0; pt < 20; ++pt) {
    const double r = rad(rng);
    const double u = uu(rng);
    const Vec4 x{u, chart.f(r) / u, th(rng), 0.7};
    const Mat4 g = chart_metric(chart, x);

    // Curvature of the chart metric by nested centered differences.
    std::array<std::array<Mat4, 4>, 4> dgam{};  // dgam[c][a][b][d] = d_c Gamma^a_{bd}
    const std::array<double, 4> w = {1.0, -8.0, 8.0, -1.0};
    const std::array<double, 4> off = {-2.0 * h, -h, h, 2.0 * h};
    for (int c = 0; c < 4; ++c) {
      for (int s = 0; s < 4; ++s) {
        Vec4 xs = x;
        xs[c] += off[s];
        const auto gam = christoffels(chart, xs, h);
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int d = 0; d < 4; ++d) dgam[c][a][b][d] += w[s] * gam[a][b][d] / (12.0 * h);
      }
    }
    // Assemble R^a_{bcd}, lower the first index, and compare with
    // g_ac g_bd - g_ad g_bc (unit sectional curvature).
    const auto gam0 = christoffels(chart, x, h);
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          std::array<double, 4> r_up{};
          for (int a = 0; a < 4; ++a) {
            double val = dgam[c][a][d][b] - dgam[d][a][c][b];
            for (int e = 0; e < 4; ++e)
              val += gam0[a][c][e] * gam0[e][d][b] - gam0[a][d][e] * gam0[e][c][b];
            r_up[a] = val;
          }
          for (int a = 0; a < 4; ++a) {
            double r_low = 0.0;
            for (int e = 0; e < 4; ++e) r_low += g[a][e] * r_up[e];
            const double oracle = g[a][c] * g[b][d] - g[a][d] * g[b][c];
            worst = std::max(worst, std::abs(r_low - oracle));
          }
        }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("cross sections embed into the cone with invertible radii") {
  auto chart = solve_f(ClassSModel::de_sitter(), 0);
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  StcmcParams p;
  p.b = 1.05;
  p.a = {0.12, 0.0, 0.05};
  auto w = stcmc_factor(p, g);
  auto pairs = chart.embed_cross_section(w);
  REQUIRE(static_cast<int>(pairs.size()) == w.omega().size());
  bool has_negative = false, has_positive = false;
  double worst = 0.0;
  for (int i = 0; i < w.omega().size(); ++i) {
    CHECK(pairs[i].second == 1.0);
    if (pairs[i].first < 0.0) has_negative = true;
    if (pairs[i].first > 0.0) has_positive = true;
    const double uv = pairs[i].first * pairs[i].second;
    worst = std::max(worst, std::abs(chart.rho(uv) - w.omega()[i]));
  }
  CHECK(worst < 1e-10);
  // The factor straddles r = 1, so u changes sign across the horizon.
  CHECK(has_negative);
  CHECK(has_positive);

  // Codimension-3 identity H^2 + 4 = 2R on the roundtripped section.
  std::vector<double> recovered(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) recovered[i] = chart.rho(pairs[i].first);
  auto w_back = ConformalFactor::from_omega(ScalarField(g, std::move(recovered)));
  auto r_field = scalar_curvature(sht, w_back);
  auto h2 = spacetime_mean_curvature(sht, w_back, LightconeModel::de_sitter());
  double worst_id = 0.0;
  for (int i = 0; i < r_field.size(); ++i) {
    worst_id = std::max(worst_id, std::abs(h2[i] + 4.0 - 2.0 * r_field[i]));
  }
  CHECK(worst_id < 1e-12);

  // Constant sections: the horizon sits at u = 0, others at f(r)/c.
  auto at_horizon = chart.embed_cross_section(ConformalFactor::constant(g, 1.0));
  for (const auto& [u, v] : at_horizon) {
    CHECK(std::abs(u) < 1e-14);
    CHECK(v == 1.0);
  }
  auto chart2 = solve_f(ClassSModel::de_sitter(), 0, 2.0);
  auto leaf2 = chart2.embed_cross_section(ConformalFactor::constant(g, 2.0));
  for (const auto& [u, v] : leaf2) {
    CHECK(std::abs(u - chart2.f(2.0) / 2.0) < 1e-15);
    CHECK(v == 2.0);
  }
  CHECK_THROWS_AS((void)chart.embed_cross_section(ConformalFactor::constant(g, 3.5)),
                  DomainError);
}

TEST_CASE("background leaves: coefficients and mean-curvature cross-check") {
  auto ds = ClassSModel::de_sitter();
  auto leaf = background_leaf(ds, 1.0);
  CHECK(leaf.gamma_coeff == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(leaf.chi_bar_coeff == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(leaf.chi_coeff) < 1e-15);  // the horizon leaf is marginally trapped
  CHECK(leaf.zeta == 0.0);

  auto flat = ClassSModel::create([](double) { return 1.0; }, 0.05, 5.0);
  auto leaf2 = background_leaf(flat, 2.0);
  CHECK(leaf2.gamma_coeff == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(leaf2.chi_bar_coeff == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(leaf2.chi_coeff == doctest::Approx(2.0).epsilon(1e-15));

  // H^2 of the leaf equals theta_bar * theta = (2/r)(2 h(r)/r), and matches
  // the cross-section geometry of omega == r under the same model.
  auto rn = ClassSModel::create(h_rn, 0.05, 3.0);
  auto g = SphericalGrid::create(16, 32);
  Sht sht(g);
  auto model = LightconeModel::generic(h_rn, "rn-like", 0.05, 3.0);
  for (double r : {0.3, 1.0, 2.2}) {
    auto lf = background_leaf(rn, r);
    // theta_bar = 2 chi_bar / gamma and theta = 2 chi / gamma on a leaf.
    const double theta_bar = 2.0 * lf.chi_bar_coeff / lf.gamma_coeff;
    const double theta = 2.0 * lf.chi_coeff / lf.gamma_coeff;
    CHECK(std::abs(theta_bar - 2.0 / r) < 1e-15);
    CHECK(std::abs(theta - 2.0 * rn.h(r) / r) < 1e-15);
    auto h2 = spacetime_mean_curvature(sht, ConformalFactor::constant(g, r), model);
    const double scale = std::max(1.0, std::abs(theta_bar * theta));
    CHECK(std::abs(h2.max() - theta_bar * theta) < 1e-12 * scale);
    CHECK(std::abs(h2.min() - theta_bar * theta) < 1e-12 * scale);
  }
  CHECK_THROWS_AS((void)background_leaf(ds, 5.0), DomainError);
}

TEST_CASE("pseudosphere embeddings: unit norm and isometric pullback") {
  std::mt19937_64 rng(77u);
  std::uniform_real_distribution<double> ts(-1.5, 1.5), th(0.3, 2.8), ph(0.0, 6.28);
  const std::array<PseudospherePatch, 4> patches = {
      PseudospherePatch::StaticPlus, PseudospherePatch::StaticMinus,
      PseudospherePatch::CosmologicalPlus, PseudospherePatch::CosmologicalMinus};
  for (auto patch : patches) {
    const bool is_static =
        patch == PseudospherePatch::StaticPlus || patch == PseudospherePatch::StaticMinus;
    std::uniform_real_distribution<double> rs =
        is_static ? std::uniform_real_distribution<double>(0.05, 0.95)
                  : std::uniform_real_distribution<double>(1.05, 3.0);
    for (int s = 0; s < 50; ++s) {
      const double t = ts(rng), r = rs(rng), theta = th(rng), phi = ph(rng);
      auto point = [&](double tt, double rr, double t2, double p2) {
        const std::array<double, 3> x = {std::sin(t2) * std::cos(p2),
                                         std::sin(t2) * std::sin(p2), std::cos(t2)};
        return pseudosphere_embed(patch, tt, rr, x);
      };
      const auto p0 = point(t, r, theta, phi);
      CHECK(std::abs(minkowski5_inner(p0, p0) - 1.0) < 1e-12);

      // Pullback metric via finite-difference Jacobian columns.
      const double step = 1e-3;
      std::array<std::array<double, 5>, 4> jac{};
      for (int c = 0; c < 4; ++c) {
        const std::array<double, 4> w = {1.0, -8.0, 8.0, -1.0};
        const std::array<double, 4> off = {-2.0 * step, -step, step, 2.0 * step};
        for (int k = 0; k < 4; ++k) {
          std::array<double, 4> q = {t, r, theta, phi};
          q[c] += off[k];
          const auto pk = point(q[0], q[1], q[2], q[3]);
          for (int d = 0; d < 5; ++d) jac[c][d] += w[k] * pk[d] / (12.0 * step);
        }
      }
      const double hval = 1.0 - r * r;
      const double expect[4] = {-hval, 1.0 / hval, r * r,
                                r * r * std::sin(theta) * std::sin(theta)};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double got = minkowski5_inner(jac[a], jac[b]);
          const double want = (a == b) ? expect[a] : 0.0;
          CHECK(std::abs(got - want) < 1e-6);
        }
    }
  }

  // Shared static limit r -> 1: both static patches approach (0, 0, x).
  const std::array<double, 3> x = {0.0, 0.6, 0.8};
  for (auto patch : {PseudospherePatch::StaticPlus, PseudospherePatch::StaticMinus}) {
    const auto p = pseudosphere_embed(patch, 1.0, 1.0 - 1e-12, x);
    CHECK(std::abs(p[0]) < 1e-5);
    CHECK(std::abs(p[1]) < 1e-5);
    CHECK(std::abs(p[2] - 0.0) < 1e-10);
    CHECK(std::abs(p[3] - 0.6) < 1e-10);
    CHECK(std::abs(p[4] - 0.8) < 1e-10);
  }
  CHECK_THROWS_AS((void)pseudosphere_embed(PseudospherePatch::StaticPlus, 0.0, 1.2, x),
                  DomainError);
  CHECK_THROWS_AS((void)pseudosphere_embed(PseudospherePatch::CosmologicalMinus, 0.0, 0.8, x),
                  DomainError);
}

TEST_CASE("chart export is deterministic; construction guards hold") {
  auto model = ClassSModel::de_sitter();
  auto chart = solve_f(model, 0);
  std::ostringstream a, b;
  chart.write_csv(a, 100);
  chart.write_csv(b, 100);
  const std::string csv = a.str();
  CHECK(csv == b.str());
  CHECK(csv.rfind("r,f,f_prime,F\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);

  CHECK_THROWS_AS((void)solve_f(model, 1), InvalidArgument);
  CHECK_THROWS_AS((void)solve_f(model, -1), InvalidArgument);
  CHECK_THROWS_AS((void)solve_f(model, 0, 0.0), InvalidArgument);
  CHECK_THROWS_AS((void)chart.f(3.5), DomainError);
  CHECK_THROWS_AS((void)chart.rho(10.0), DomainError);

  // A zero of h inside the chart domain that is not the chart's own horizon
  // (here: deliberately omitted from the listed horizons) is refused.
  ClassSModel incomplete;
  incomplete.h = [](double r) { return (1.0 - r * r) * (2.0 - r) / 2.0; };
  incomplete.r_lo = 0.05;
  incomplete.r_hi = 3.0;
  incomplete.horizons = {{1.0, -1.0}};  // 1/h'(1); the zero at r = 2 is left out
  CHECK_THROWS_AS((void)solve_f(incomplete, 0), DomainError);
}

}  // TEST_SUITE
