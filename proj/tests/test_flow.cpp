// Flow integrator: round-sphere dynamics against closed forms, exact area
// laws, the rescaled clock and volume-preserving normalization, ancient
// solutions as genuine PDE solutions, ordering barriers, and the
// shrink/steady/expand outcome classification. Oracles are closed forms
// evaluated test-side; the integrator never sees them.
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nullcone/errors.hpp"
#include "nullcone/exact.hpp"
#include "nullcone/flow.hpp"
#include "nullcone/numerics.hpp"
#include "nullcone/random_field.hpp"

using namespace nullcone;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Five-point finite-difference time derivative of omega at t, sampled from a
// trajectory callback (used to check that exact solutions satisfy the flow
// equation the integrator discretizes).
ScalarField fd_time_derivative(const std::function<ConformalFactor(double)>& traj, double t,
                               double delta) {
  std::vector<double> nodes(5);
  for (int j = 0; j < 5; ++j) nodes[j] = t + (j - 2) * delta;
  const std::vector<double> w = fd_weights(t, nodes, 1);
  ScalarField out;
  for (int j = 0; j < 5; ++j) {
    ScalarField om = traj(nodes[j]).omega();
    if (j == 0) {
      out = w[0] * om;
    } else {
      out = out + w[j] * om;
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("flow_engine") {

TEST_CASE("rhs on round spheres: -h(b)/b for every model") {
  auto g = SphericalGrid::create(16, 32);
  Sht sht(g);
  FlowEngine eng(sht);
  auto generic = LightconeModel::generic(
      [](double r) { return 1.0 - 2.0 / r + 0.64 / (r * r); }, "rn-like", 1.7, 50.0);
  for (double b : {0.5, 1.0, 2.0, 3.0}) {
    auto w = ConformalFactor::constant(g, b);
    for (const auto& model : {LightconeModel::minkowski(), LightconeModel::de_sitter(),
                              LightconeModel::anti_de_sitter()}) {
      double expect = -model.h(b) / b;
      auto r = eng.rhs(w, model);
      CHECK(std::abs(r.min() - expect) < 1e-12);
      CHECK(std::abs(r.max() - expect) < 1e-12);
    }
    if (b > 1.7) {
      double expect = -generic.h(b) / b;
      auto r = eng.rhs(w, generic);
      CHECK(std::abs(r.min() - expect) < 1e-12);
      CHECK(std::abs(r.max() - expect) < 1e-12);
    }
  }
  // Signs at the de Sitter trichotomy: b = 1 stationary, above grows, below
  // shrinks; and the rhs matches the time derivative of the sphere solution.
  auto ds = LightconeModel::de_sitter();
  CHECK(eng.rhs(ConformalFactor::constant(g, 1.0), ds).max() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(eng.rhs(ConformalFactor::constant(g, 2.0), ds).min() > 0.0);
  CHECK(eng.rhs(ConformalFactor::constant(g, 0.5), ds).max() < 0.0);
  for (double b0 : {0.6, 1.4}) {
    const double delta = 1e-5;
    const double db_dt =
        (sphere_solution(b0, delta) - sphere_solution(b0, -delta)) / (2.0 * delta);
    auto r = eng.rhs(ConformalFactor::constant(g, b0), ds);
    CHECK(std::abs(r.max() - db_dt) < 1e-9);
  }
}

TEST_CASE("unit sphere is a fixed point of both schemes") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  auto w = ConformalFactor::constant(g, 1.0);
  FlowConfig cfg;
  for (auto scheme : {FlowScheme::Rk4Explicit, FlowScheme::ImexSbdf2}) {
    cfg.scheme = scheme;
    auto s1 = eng.step(eng.make_state(w, cfg.model), cfg);
    CHECK(max_abs_diff(s1.omega.omega(), w.omega()) < 1e-13);
  }
  cfg.scheme = FlowScheme::Rk4Explicit;
  cfg.t_end = 0.5;
  auto series = eng.run(w, cfg);
  CHECK(series.outcome == FlowOutcome::ConvergesToMots);
  for (const auto& s : series.states) CHECK(std::abs(s.area - kFourPi) < 1e-11);
  CHECK(series.final_h2_abs_max < 1e-12);
}

TEST_CASE("round spheres track the closed-form radius") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  FlowConfig cfg;
  cfg.record_every = 1000;
  for (double b0 : {0.5, 1.0, 2.0}) {
    auto text = sphere_extinction_time(b0);
    cfg.t_end = text ? 0.9 * *text : 1.0;
    auto series = eng.run(ConformalFactor::constant(g, b0), cfg);
    const auto& last = series.states.back();
    CHECK(last.t == doctest::Approx(cfg.t_end).epsilon(1e-12));
    const double b_exact = sphere_solution(b0, last.t);
    double worst = 0.0;
    for (const auto& v : last.omega.omega().values()) worst = std::max(worst, std::abs(v - b_exact));
    CHECK(worst < 1e-7);
    if (text) {
      REQUIRE(series.t_max_predicted.has_value());
      CHECK(*series.t_max_predicted == doctest::Approx(*text).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed-form area laws hold for perturbed data on every named model") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  auto w0 = ConformalFactor::from_log(synthesize_random(sht, 11, 8, 0.02));
  struct Item {
    LightconeModel model;
    double t_end;
  };
  const Item items[] = {
      {LightconeModel::de_sitter(), 1.0},
      {LightconeModel::minkowski(), 0.3},
      {LightconeModel::anti_de_sitter(), 0.25},
  };
  for (const auto& item : items) {
    FlowConfig cfg;
    cfg.model = item.model;
    cfg.t_end = item.t_end;
    cfg.record_every = 50;
    auto series = eng.run(w0, cfg);
    CHECK(series.states.size() > 5);
    CHECK(area_law_check(series) < 1e-8);
    // The recorded closed-form column agrees with the oracle evaluated here.
    const double a0 = series.area0();
    for (const auto& s : series.states) {
      REQUIRE(s.area_closed.has_value());
      CHECK(*s.area_closed ==
            doctest::Approx(*area_closed_form(a0, s.t, item.model)).epsilon(1e-14));
    }
  }
}

TEST_CASE("recorded trajectory satisfies d(omega^2)/dt = -H^2 omega^2 / 2") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  StcmcParams p;
  p.b = 1.3;
  p.a = {0.2, 0.0, 0.0};
  auto w0 = stcmc_factor(p, g);
  FlowConfig cfg;
  cfg.dt_init = 5e-4;  // below the stability bound, so the step stays fixed
  cfg.t_end = 10.0 * cfg.dt_init;
  cfg.record_every = 1;
  auto series = eng.run(w0, cfg);
  REQUIRE(series.states.size() >= 9);
  const size_t k = 5;
  std::vector<double> nodes(5);
  for (int j = 0; j < 5; ++j) nodes[j] = series.states[k - 2 + j].t;
  const auto wts = fd_weights(nodes[2], nodes, 1);
  const auto& sk = series.states[k];
  auto h2 = spacetime_mean_curvature(sht, sk.omega, cfg.model);
  const auto& om_k = sk.omega.omega();
  double worst = 0.0;
  for (int i = 0; i < om_k.size(); ++i) {
    double deriv = 0.0;
    for (int j = 0; j < 5; ++j) {
      const double om = series.states[k - 2 + j].omega.omega()[i];
      deriv += wts[j] * om * om;
    }
    worst = std::max(worst, std::abs(deriv + 0.5 * h2[i] * om_k[i] * om_k[i]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("rescaled clock matches its closed form along a shrinking run") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  auto w0 = ConformalFactor::constant(g, std::sqrt(0.5));  // area 2 pi
  FlowConfig cfg;
  cfg.t_end = 0.3;
  cfg.record_every = 20;
  auto series = eng.run(w0, cfg);
  const double a0 = series.area0();
  CHECK(std::abs(a0 - 2.0 * kPi) < 1e-12);
  for (const auto& s : series.states) {
    CHECK(std::abs(s.t_tilde - t_tilde_closed_form(a0, s.t)) < 1e-8);
  }
}

TEST_CASE("rescaled clock saturates at the threshold area") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  auto w0 = ConformalFactor::constant(g, std::sqrt(2.0));  // area 8 pi
  FlowConfig cfg;
  cfg.t_end = 12.0;
  cfg.stop_area_ceiling = kFourPi * 1e12;
  cfg.record_every = 200;
  auto series = eng.run(w0, cfg);
  CHECK(series.outcome == FlowOutcome::Running);  // grows forever, never rounds off
  const double a0 = series.area0();
  double prev = -1e300;
  double tail_min = 1e300, tail_max = -1e300;
  for (const auto& s : series.states) {
    CHECK(s.t_tilde > prev);
    prev = s.t_tilde;
    CHECK(std::abs(s.t_tilde - t_tilde_closed_form(a0, s.t)) < 1e-8);
    if (s.t >= 10.0) {
      tail_min = std::min(tail_min, s.t_tilde);
      tail_max = std::max(tail_max, s.t_tilde);
    }
  }
  // The clock converges: bounded by ln 2, with a Cauchy tail beyond t = 10.
  CHECK(prev < std::log(2.0));
  CHECK(std::abs(series.states.back().t_tilde - std::log(2.0)) < 1e-6);
  CHECK(tail_max - tail_min < 1e-6);
}

TEST_CASE("volume-preserving rescaling: constant area, normalized flow equation") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  auto w0 = ConformalFactor::from_log(synthesize_random(sht, 17, 6, 0.05));
  FlowConfig cfg;
  // Dense sampling: the l = 6 modes relax at rate ~ l(l+1), so the 5-point
  // stencil needs a fine clock spacing for its truncation error to sit well
  // below the tolerance.
  cfg.dt_init = 2e-4;
  cfg.t_end = 10.0 * cfg.dt_init;
  cfg.record_every = 1;
  auto series = eng.run(w0, cfg);
  auto rs = rescale_volume_preserving(series);
  REQUIRE(rs.states.size() >= 7);
  for (const auto& s : rs.states) {
    CHECK(std::abs(s.area - rs.area0) < 1e-10 * rs.area0);
    CHECK(std::abs(s.t_tilde - s.t_tilde_closed) < 1e-8);
  }
  CHECK(vprf_max_residual(sht, rs) < 1e-6);
}

TEST_CASE("ordering barrier: data between two spheres stays between them") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  StcmcParams p;
  p.b = 0.95;
  p.a = {0.1, 0.0, 0.0};
  auto w0 = stcmc_factor(p, g);
  CHECK(w0.omega().max() < 1.1);
  CHECK(w0.omega().min() > 0.85);
  FlowConfig cfg;
  cfg.t_end = 0.4;
  cfg.record_every = 50;
  auto series = eng.run(w0, cfg);
  for (const auto& s : series.states) {
    const double hi = sphere_solution(1.1, s.t);
    const double lo = sphere_solution(0.85, s.t);
    CHECK(s.omega.omega().max() < hi);
    CHECK(s.omega.omega().min() > lo);
  }
}

TEST_CASE("outcome trichotomy around the threshold area") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  auto noisy = ConformalFactor::from_log(synthesize_random(sht, 3, 5, 0.05));

  SUBCASE("area below threshold shrinks to the tip at the predicted time") {
    auto w0 = rescaled_to_area(noisy, 2.0 * kPi);
    FlowConfig cfg;
    auto series = eng.run(w0, cfg);
    CHECK(series.outcome == FlowOutcome::ShrinksToTip);
    REQUIRE(series.t_max_observed.has_value());
    REQUIRE(series.t_max_predicted.has_value());
    const double T = 0.5 * std::log(2.0);
    CHECK(*series.t_max_predicted == doctest::Approx(T).epsilon(1e-12));
    CHECK(std::abs(*series.t_max_observed - T) < 0.02 * T);
    for (const auto& s : series.states) CHECK(s.area < kFourPi);
  }

  SUBCASE("area exactly at threshold rounds off to the stationary sphere") {
    auto w0 = rescaled_to_area(noisy, kFourPi);
    FlowConfig cfg;
    cfg.t_end = 6.0;
    auto series = eng.run(w0, cfg);
    CHECK(series.outcome == FlowOutcome::ConvergesToMots);
    for (const auto& s : series.states) CHECK(std::abs(s.area - kFourPi) < 1e-4 * kFourPi);
    CHECK(series.final_h2_abs_max < 1e-4);
    CHECK(series.final_roundness < 1e-4);
    CHECK(series.final_roundness < 1e-2 * series.states.front().roundness);
    CHECK(std::string(to_string(series.outcome)) == "ConvergesToMOTS");
  }

  SUBCASE("area above threshold expands beyond any bound") {
    auto w0 = rescaled_to_area(noisy, 8.0 * kPi);
    FlowConfig cfg;
    auto series = eng.run(w0, cfg);
    CHECK(series.outcome == FlowOutcome::ExpandsToInfinity);
    for (const auto& s : series.states) CHECK(s.area > kFourPi);
    CHECK(series.states.back().area >= cfg.stop_area_ceiling * 0.9);
  }
}

TEST_CASE("implicit-explicit scheme reaches extinction cheaply and accurately") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  FlowConfig cfg;
  cfg.scheme = FlowScheme::ImexSbdf2;

  SUBCASE("de Sitter half-sphere") {
    auto series = eng.run(ConformalFactor::constant(g, 0.5), cfg);
    CHECK(series.outcome == FlowOutcome::ShrinksToTip);
    const double T = 0.5 * std::log(4.0 / 3.0);
    REQUIRE(series.t_max_observed.has_value());
    CHECK(std::abs(*series.t_max_observed - T) < 0.02 * T);
    CHECK(series.steps_taken < 3000);  // no parabolic step-size collapse
  }

  SUBCASE("Minkowski unit sphere") {
    cfg.model = LightconeModel::minkowski();
    auto series = eng.run(ConformalFactor::constant(g, 1.0), cfg);
    CHECK(series.outcome == FlowOutcome::ShrinksToTip);
    REQUIRE(series.t_max_observed.has_value());
    CHECK(std::abs(*series.t_max_observed - 0.5) < 0.01);
  }

  SUBCASE("anti-de Sitter always extinguishes") {
    cfg.model = LightconeModel::anti_de_sitter();
    auto noisy = ConformalFactor::from_log(synthesize_random(sht, 5, 5, 0.05));
    auto series = eng.run(rescaled_to_area(noisy, kFourPi), cfg);
    CHECK(series.outcome == FlowOutcome::ShrinksToTip);
    const double T = 0.5 * std::log(2.0);
    REQUIRE(series.t_max_observed.has_value());
    CHECK(std::abs(*series.t_max_observed - T) < 0.02 * T);
  }
}

TEST_CASE("ancient solutions satisfy the flow equation") {
  auto g = SphericalGrid::create(64, 128);
  Sht sht(g);
  FlowEngine eng(sht);
  auto ds = LightconeModel::de_sitter();
  auto boost = LorentzBoost::along({0.3, -0.4, 0.87}, 0.2);
  std::vector<AncientSolution> sols;
  int combo = 0;
  for (auto kind : {AncientKind::ShrinkingSphere, AncientKind::KingRosenau}) {
    for (double off : {0.125, 0.5, 2.0}) {
      AncientSolution sol;
      sol.kind = kind;
      sol.t_hat_offset = off;
      if (combo % 2 == 1) sol.boost = boost;  // alternate plain and boosted
      ++combo;
      sols.push_back(sol);
    }
  }
  // Sample at t = -1/2: every profile age lies in the band the grid resolves
  // spectrally (the King-Rosenau factor steepens exponentially with age).
  const double t_eval = -0.5;
  for (const auto& sol : sols) {
    auto traj = [&](double t) { return nmcf_from_ancient(sht, sol, t); };
    ScalarField lhs = fd_time_derivative(traj, t_eval, 1e-3);
    ScalarField rhs_field = eng.rhs(traj(t_eval), ds);
    CHECK(max_abs_diff(lhs, rhs_field) < 1e-6);
    // Closed-form area limit: every member starts at the threshold area.
    CHECK(std::abs(ancient_area(sol, -20.0) - kFourPi) < 1e-6);
  }
  // Unboosted sphere members are the round-sphere solutions themselves.
  for (double off : {0.125, 0.5, 2.0}) {
    AncientSolution sol;
    sol.kind = AncientKind::ShrinkingSphere;
    sol.t_hat_offset = off;
    const double b0 = std::sqrt(2.0 * off);
    for (double t : {-1.0, 0.05}) {
      if (auto text = sphere_extinction_time(b0); text && t >= *text) continue;
      auto w = nmcf_from_ancient(sht, sol, t);
      const double b_exact = sphere_solution(b0, t);
      double worst = 0.0;
      for (const auto& v : w.omega().values()) worst = std::max(worst, std::abs(v - b_exact));
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("King-Rosenau profile solves the normalized (Ricci) flow") {
  auto g = SphericalGrid::create(64, 128);
  Sht sht(g);
  // d(omega_hat^2)/dt_hat = -R_hat omega_hat^2, checked by finite differences
  // in t_hat against the profile's own curvature.
  for (double t_hat : {-2.0, -1.0, -0.1}) {
    const double delta = 1e-4;
    std::vector<double> nodes(5);
    for (int j = 0; j < 5; ++j) nodes[j] = t_hat + (j - 2) * delta;
    const auto wts = fd_weights(t_hat, nodes, 1);
    auto w = ancient_profile(AncientKind::KingRosenau, t_hat, g);
    auto r = scalar_curvature(sht, w);
    const auto& om = w.omega();
    double worst = 0.0;
    for (int i = 0; i < om.size(); ++i) {
      double deriv = 0.0;
      for (int j = 0; j < 5; ++j) {
        const double oj = ancient_profile(AncientKind::KingRosenau, nodes[j], g).omega()[i];
        deriv += wts[j] * oj * oj;
      }
      worst = std::max(worst, std::abs(deriv + r[i] * om[i] * om[i]));
    }
    CHECK(worst < 1e-7);
  }
  // Genuinely non-round: the profile's curvature oscillation is macroscopic.
  CHECK(roundness(sht, ancient_profile(AncientKind::KingRosenau, -1.0, g)) > 1e-3);
}

TEST_CASE("generic model: no closed forms, bracket enforcement, flow runs") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  auto m = LightconeModel::generic([](double r) { return 1.0 - 2.0 / r + 0.64 / (r * r); },
                                   "rn-like", 2.0, 50.0);
  CHECK(!predict_tmax(kFourPi, m).has_value());
  CHECK(!area_closed_form(kFourPi, 0.3, m).has_value());
  CHECK_THROWS_AS((void)eng.rhs(ConformalFactor::constant(g, 1.0), m), DomainError);

  FlowConfig cfg;
  cfg.model = m;
  cfg.t_end = 0.05;
  cfg.record_every = 10;
  auto series = eng.run(ConformalFactor::constant(g, 3.0), cfg);
  CHECK(series.outcome == FlowOutcome::Running);
  CHECK(series.states.back().area < series.states.front().area);  // h(3) > 0 shrinks
  for (const auto& s : series.states) CHECK(!s.area_closed.has_value());
  CHECK_THROWS_AS((void)area_law_check(series), InvalidArgument);
  std::ostringstream csv;
  series.write_csv(csv);
  CHECK(csv.str().find("nan") != std::string::npos);
}

TEST_CASE("emission is deterministic and carries the exact column set") {
  auto g = SphericalGrid::create(32, 64);
  Sht sht(g);
  FlowEngine eng(sht);
  auto w0 = ConformalFactor::from_log(synthesize_random(sht, 23, 6, 0.03));
  FlowConfig cfg;
  cfg.t_end = 0.02;
  cfg.record_every = 2;
  auto run_csv = [&]() {
    auto series = eng.run(w0, cfg);
    std::ostringstream os;
    series.write_csv(os);
    return os.str();
  };
  const std::string a = run_csv();
  const std::string b = run_csv();
  CHECK(a == b);
  CHECK(a.rfind("t,area,area_closed_form,R_min,R_max,H2_min,H2_max,roundness,t_tilde,t_hat,dt\n",
                0) == 0);
  auto series = eng.run(w0, cfg);
  const std::string js = series.summary_json();
  CHECK(js.find("\"outcome\"") != std::string::npos);
  CHECK(js.find("\"steps_taken\"") != std::string::npos);
}

TEST_CASE("error contracts") {
  auto g = SphericalGrid::create(16, 32);
  Sht sht(g);
  FlowEngine eng(sht);

  FlowConfig bad;
  bad.dt_init = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = FlowConfig{};
  bad.cfl_safety = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = FlowConfig{};
  bad.record_every = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = FlowConfig{};
  bad.stop_area_ceiling = bad.stop_area_floor / 2.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);

  // Closed-form singularity times.
  auto ds = LightconeModel::de_sitter();
  CHECK(*predict_tmax(2.0 * kPi, ds) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  CHECK(!predict_tmax(kFourPi, ds).has_value());
  CHECK(!predict_tmax(5.0 * kPi, ds).has_value());
  CHECK(*predict_tmax(kFourPi, LightconeModel::minkowski()) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(*predict_tmax(kFourPi, LightconeModel::anti_de_sitter()) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS((void)predict_tmax(-1.0, ds), InvalidArgument);

  // Rescaling preconditions.
  FlowSeries empty;
  CHECK_THROWS_AS((void)area_law_check(empty), InvalidArgument);
  empty.model = LightconeModel::minkowski();
  CHECK_THROWS_AS((void)rescale_volume_preserving(empty), InvalidArgument);
  RescaledSeries rs;
  rs.area0 = kFourPi;
  CHECK_THROWS_AS((void)vprf_max_residual(sht, rs), InvalidArgument);
  CHECK_THROWS_AS((void)t_tilde_closed_form(2.0 * kPi, 1.0), DomainError);
}

}  // TEST_SUITE
