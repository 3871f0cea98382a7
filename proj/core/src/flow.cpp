#include "nullcone/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "nullcone/errors.hpp"
#include "nullcone/exact.hpp"
#include "nullcone/numerics.hpp"

namespace nullcone {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;
// Extent of the negative real axis covered by the RK4 stability region.
constexpr double kRk4Axis = 2.785;
constexpr long long kMaxSteps = 20'000'000;

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Mutable integration state shared by run() and the standalone step().
struct Work {
  SpectralCoeffs cu;
  double t = 0.0;
  double t_tilde = 0.0;
  double area0 = 0.0;
  // Multistep history: previous spectral state, its explicit derivative,
  // the previous clock rate/value, and the previous step size.
  bool have_history = false;
  SpectralCoeffs cu_prev;
  SpectralCoeffs f_prev;
  double c_prev = 0.0;
  double t_tilde_prev = 0.0;
  double dt_prev = 0.0;
};

}  // namespace

const char* to_string(FlowScheme s) {
  switch (s) {
    case FlowScheme::Rk4Explicit:
      return "rk4";
    case FlowScheme::ImexSbdf2:
      return "imex";
  }
  return "?";
}

const char* to_string(FlowOutcome o) {
  switch (o) {
    case FlowOutcome::Running:
      return "Running";
    case FlowOutcome::ShrinksToTip:
      return "ShrinksToTip";
    case FlowOutcome::ConvergesToMots:
      return "ConvergesToMOTS";
    case FlowOutcome::ExpandsToInfinity:
      return "ExpandsToInfinity";
  }
  return "?";
}

void FlowConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string("FlowConfig: ") + name + " must be positive and finite");
    }
  };
  positive(dt_init, "dt_init");
  positive(t_end, "t_end");
  positive(stop_area_floor, "stop_area_floor");
  positive(stop_area_ceiling, "stop_area_ceiling");
  positive(roundness_tol, "roundness_tol");
  positive(mots_h2_tol, "mots_h2_tol");
  positive(area_rate_safety, "area_rate_safety");
  if (!(cfl_safety > 0.0) || cfl_safety > 1.0) {
    throw InvalidArgument("FlowConfig: cfl_safety must lie in (0, 1]");
  }
  if (stop_area_ceiling <= stop_area_floor) {
    throw InvalidArgument("FlowConfig: stop_area_ceiling must exceed stop_area_floor");
  }
  if (record_every < 1) {
    throw InvalidArgument("FlowConfig: record_every must be >= 1");
  }
}

double FlowSeries::area0() const {
  if (states.empty()) throw InvalidArgument("FlowSeries: no recorded states");
  return states.front().area;
}

void FlowSeries::write_csv(std::ostream& os) const {
  std::string out;
  out.reserve(states.size() * 200 + 128);
  out += "t,area,area_closed_form,R_min,R_max,H2_min,H2_max,roundness,t_tilde,t_hat,dt\n";
  for (const FlowState& s : states) {
    append_g17(out, s.t);
    out += ',';
    append_g17(out, s.area);
    out += ',';
    append_g17(out, s.area_closed ? *s.area_closed : std::numeric_limits<double>::quiet_NaN());
    out += ',';
    append_g17(out, s.r_min);
    out += ',';
    append_g17(out, s.r_max);
    out += ',';
    append_g17(out, s.h2_min);
    out += ',';
    append_g17(out, s.h2_max);
    out += ',';
    append_g17(out, s.roundness);
    out += ',';
    append_g17(out, s.t_tilde);
    out += ',';
    append_g17(out, s.t_hat);
    out += ',';
    append_g17(out, s.dt);
    out += '\n';
  }
  os << out;
}

std::string FlowSeries::summary_json() const {
  nlohmann::json j;
  j["model"] = model.label();
  j["scheme"] = to_string(scheme);
  j["outcome"] = to_string(outcome);
  j["states_recorded"] = states.size();
  j["steps_taken"] = steps_taken;
  j["area_initial"] = states.empty() ? 0.0 : states.front().area;
  j["area_final"] = states.empty() ? 0.0 : states.back().area;
  j["t_final"] = states.empty() ? 0.0 : states.back().t;
  if (t_max_observed) j["t_max_observed"] = *t_max_observed;
  if (t_max_predicted) j["t_max_predicted"] = *t_max_predicted;
  j["final_h2_abs_max"] = final_h2_abs_max;
  j["final_roundness"] = final_roundness;
  j["final_roundness_normalized"] = final_roundness_normalized;
  return j.dump(2);
}

//----------------------------------------------------------------------------
// Engine internals
//----------------------------------------------------------------------------

struct FlowEngine::Impl {
  GridPtr pad_grid;
  std::unique_ptr<Sht> pad;
  int lmax = 0;
  std::vector<double> degree_scale;  // l(l+1) aligned with the packed coefficient layout

  // One right-hand-side evaluation at a spectral state: the (dealiased)
  // time derivative of u = ln omega plus the scalars every step needs.
  struct Eval {
    SpectralCoeffs du;
    double area = 0.0;
    double area_rate = 0.0;
    double max_inv_om2 = 0.0;  // max e^{-2u}, the diffusive stiffness scale
  };

  Eval eval(const SpectralCoeffs& cu, const LightconeModel& model) const {
    Eval ev;
    SpectralCoeffs clap = cu;
    clap.scale_by_degree([](int l) { return -static_cast<double>(l) * (l + 1); });
    ScalarField u_pad = pad->synthesize(cu);
    ScalarField lap_pad = pad->synthesize(clap);
    ScalarField g(pad_grid);
    const bool generic = model.kind() == ModelKind::ClassS;
    const SphericalGrid& gr = *pad_grid;
    double area = 0.0, rate = 0.0, max_inv = 0.0;
    for (int i = 0; i < gr.nlat(); ++i) {
      const double wq = gr.node_weight(i);
      for (int j = 0; j < gr.nlon(); ++j) {
        const int idx = gr.node_index(i, j);
        const double u = u_pad[idx];
        const double om = std::exp(u);
        if (generic && (om <= model.bracket_lo() || om >= model.bracket_hi())) {
          throw DomainError("flow: conformal factor left the model's radial bracket");
        }
        const double inv2 = std::exp(-2.0 * u);
        const double dudt = inv2 * (lap_pad[idx] - model.h(om));
        g[idx] = dudt;
        const double om2 = om * om;
        area += wq * om2;
        rate += wq * 2.0 * om2 * dudt;
        max_inv = std::max(max_inv, inv2);
      }
    }
    if (!std::isfinite(area) || !std::isfinite(rate)) {
      throw IntegratorError("flow: non-finite field in a right-hand-side evaluation");
    }
    ev.area = area;
    ev.area_rate = rate;
    ev.max_inv_om2 = max_inv;
    ev.du = pad->analyze(g);
    return ev;
  }

  double choose_dt(const FlowConfig& config, const Eval& ev) const {
    if (config.scheme == FlowScheme::Rk4Explicit) {
      return std::min(config.dt_init,
                      kRk4Axis * config.cfl_safety /
                          (std::max(ev.max_inv_om2, 1e-300) * lmax * (lmax + 1)));
    }
    return std::min(config.dt_init,
                    config.area_rate_safety * ev.area / std::max(std::abs(ev.area_rate), 1e-300));
  }

  void advance_rk4(Work& w, const Eval& k1, double dt, const LightconeModel& model) const {
    const double c1 = w.area0 / k1.area;
    SpectralCoeffs stage = w.cu;
    axpy(stage.raw(), 0.5 * dt, k1.du.raw());
    Eval k2 = eval(stage, model);
    const double c2 = w.area0 / k2.area;

    stage = w.cu;
    axpy(stage.raw(), 0.5 * dt, k2.du.raw());
    Eval k3 = eval(stage, model);
    const double c3 = w.area0 / k3.area;

    stage = w.cu;
    axpy(stage.raw(), dt, k3.du.raw());
    Eval k4 = eval(stage, model);
    const double c4 = w.area0 / k4.area;

    axpy(w.cu.raw(), dt / 6.0, k1.du.raw());
    axpy(w.cu.raw(), dt / 3.0, k2.du.raw());
    axpy(w.cu.raw(), dt / 3.0, k3.du.raw());
    axpy(w.cu.raw(), dt / 6.0, k4.du.raw());
    w.t_tilde += dt / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
    w.t += dt;
    w.have_history = false;
  }

  // SBDF with the stiff sigma*Delta part implicit (spectrally diagonal) and
  // the remainder extrapolated; variable-step second-order formula after a
  // first-order bootstrap. The splitting constant sigma is refreshed every
  // step and the stored explicit derivatives are re-split against the
  // current sigma, keeping the two-level formula consistent.
  void advance_imex(Work& w, const Eval& ev, double dt) const {
    const std::vector<double>& deg = degree_scale;
    const double sigma = 1.05 * ev.max_inv_om2;
    const double c_now = w.area0 / ev.area;
    SpectralCoeffs next(lmax);
    std::vector<double>& out = next.raw();
    const std::vector<double>& cu = w.cu.raw();
    const std::vector<double>& f = ev.du.raw();
    const double t_tilde_n = w.t_tilde;

    if (!w.have_history) {
      for (size_t i = 0; i < out.size(); ++i) {
        const double n_now = f[i] + sigma * deg[i] * cu[i];
        out[i] = (cu[i] + dt * n_now) / (1.0 + dt * sigma * deg[i]);
      }
      w.t_tilde = t_tilde_n + dt * c_now;
    } else {
      const double r = dt / w.dt_prev;
      const double a0 = (1.0 + r) * (1.0 + r) / (1.0 + 2.0 * r);
      const double a1 = r * r / (1.0 + 2.0 * r);
      const double bdt = dt * (1.0 + r) / (1.0 + 2.0 * r);
      const std::vector<double>& cup = w.cu_prev.raw();
      const std::vector<double>& fp = w.f_prev.raw();
      for (size_t i = 0; i < out.size(); ++i) {
        const double n_now = f[i] + sigma * deg[i] * cu[i];
        const double n_prev = fp[i] + sigma * deg[i] * cup[i];
        const double rhs = a0 * cu[i] - a1 * cup[i] + bdt * ((1.0 + r) * n_now - r * n_prev);
        out[i] = rhs / (1.0 + bdt * sigma * deg[i]);
      }
      w.t_tilde = a0 * t_tilde_n - a1 * w.t_tilde_prev + bdt * ((1.0 + r) * c_now - r * w.c_prev);
    }
    w.cu_prev = std::move(w.cu);
    w.f_prev = ev.du;
    w.c_prev = c_now;
    w.t_tilde_prev = t_tilde_n;
    w.dt_prev = dt;
    w.have_history = true;
    w.cu = std::move(next);
    w.t += dt;
  }

  void advance(Work& w, const Eval& ev, double dt, const FlowConfig& config) const {
    if (config.scheme == FlowScheme::Rk4Explicit) {
      advance_rk4(w, ev, dt, config.model);
    } else {
      advance_imex(w, ev, dt);
    }
  }
};

FlowEngine::FlowEngine(const Sht& sht) : sht_(&sht), impl_(std::make_unique<Impl>()) {
  const SphericalGrid& g = sht.grid();
  const int lmax = g.lmax();
  const int pad_nlat = (3 * g.nlat() + 1) / 2;
  const int pad_nlon = std::max(2 * pad_nlat, 2 * lmax + 2);
  impl_->pad_grid = SphericalGrid::create(pad_nlat, pad_nlon, lmax);
  impl_->pad = std::make_unique<Sht>(impl_->pad_grid);
  impl_->lmax = lmax;
  SpectralCoeffs scale(lmax);
  for (int l = 0; l <= lmax; ++l) {
    for (int m = 0; m <= l; ++m) {
      scale.at(l, m, 0) = static_cast<double>(l) * (l + 1);
      if (m >= 1) scale.at(l, m, 1) = static_cast<double>(l) * (l + 1);
    }
  }
  impl_->degree_scale = scale.raw();
}

FlowEngine::~FlowEngine() = default;

const Sht& FlowEngine::padded_sht() const { return *impl_->pad; }

ScalarField FlowEngine::rhs(const ConformalFactor& w, const LightconeModel& model) const {
  ScalarField h2 = spacetime_mean_curvature(*sht_, w, model);
  ScalarField out = w.omega() * h2;
  for (double& v : out.values()) v *= -0.25;
  return out;
}

FlowState FlowEngine::make_state(const ConformalFactor& w, const LightconeModel& model, double t,
                                 double t_tilde, double area0, double dt) const {
  FlowState s;
  s.t = t;
  s.omega = w;
  ScalarField r = scalar_curvature(*sht_, w);
  ScalarField h2 = spacetime_mean_curvature(*sht_, w, model);
  s.area = area(w);
  s.r_min = r.min();
  s.r_max = r.max();
  s.h2_min = h2.min();
  s.h2_max = h2.max();
  s.roundness = s.r_max - s.r_min;
  s.t_tilde = t_tilde;
  s.t_hat = ricci_time(t);
  s.dt = dt;
  s.area0 = area0 > 0.0 ? area0 : s.area;
  s.area_closed = area_closed_form(s.area0, t, model);
  return s;
}

FlowState FlowEngine::step(const FlowState& s, const FlowConfig& config) const {
  config.validate();
  Work w;
  w.cu = sht_->analyze(s.omega.u());
  w.t = s.t;
  w.t_tilde = s.t_tilde;
  w.area0 = s.area0 > 0.0 ? s.area0 : s.area;
  Impl::Eval ev = impl_->eval(w.cu, config.model);
  const double dt = impl_->choose_dt(config, ev);
  impl_->advance(w, ev, dt, config);
  ScalarField u_new = sht_->synthesize(w.cu);
  if (!u_new.finite()) throw IntegratorError("flow: step produced non-finite data");
  return make_state(ConformalFactor::from_log(std::move(u_new)), config.model, w.t, w.t_tilde,
                    w.area0, dt);
}

FlowSeries FlowEngine::run(const ConformalFactor& w0, const FlowConfig& config) const {
  config.validate();
  FlowSeries series;
  series.model = config.model;
  series.scheme = config.scheme;

  Work w;
  w.cu = sht_->analyze(w0.u());
  series.states.push_back(make_state(w0, config.model, 0.0, 0.0, -1.0, 0.0));
  w.area0 = series.states.front().area;
  series.t_max_predicted = predict_tmax(w.area0, config.model);

  long long steps = 0;
  long long last_recorded_step = 0;
  double last_dt = 0.0;
  FlowOutcome outcome = FlowOutcome::Running;
  std::optional<double> t_obs;

  while (true) {
    Impl::Eval ev = impl_->eval(w.cu, config.model);

    if (ev.area <= config.stop_area_floor) {
      outcome = FlowOutcome::ShrinksToTip;
      double t_ext = w.t;
      if (ev.area_rate < 0.0) t_ext += ev.area / -ev.area_rate;
      if (series.t_max_predicted) {
        const double rel = std::abs(t_ext - *series.t_max_predicted) /
                           std::max(std::abs(*series.t_max_predicted), 1e-12);
        if (rel > 0.02) {
          std::ostringstream msg;
          msg << "flow: area floor reached at t = " << w.t << " (extrapolated extinction "
              << t_ext << ") but the closed-form extinction time is " << *series.t_max_predicted
              << "; refusing to report extinction";
          throw IntegratorError(msg.str());
        }
      }
      t_obs = t_ext;
      break;
    }
    if (ev.area >= config.stop_area_ceiling) {
      outcome = FlowOutcome::ExpandsToInfinity;
      break;
    }
    if (w.t >= config.t_end - 1e-12 * std::max(1.0, std::abs(config.t_end))) {
      break;  // classified below from the terminal state's certificates
    }
    if (steps >= kMaxSteps) {
      throw IntegratorError("flow: step budget exhausted before any stopping criterion");
    }

    double dt = std::min(impl_->choose_dt(config, ev), config.t_end - w.t);
    if (!(dt > 1e-14)) {
      throw IntegratorError("flow: step size collapsed; integrator failure, not extinction");
    }
    impl_->advance(w, ev, dt, config);
    ++steps;
    last_dt = dt;

    if (steps % config.record_every == 0) {
      ScalarField u_now = sht_->synthesize(w.cu);
      if (!u_now.finite()) {
        throw IntegratorError("flow: non-finite state with area above the floor (numerical bug)");
      }
      series.states.push_back(make_state(ConformalFactor::from_log(std::move(u_now)), config.model,
                                         w.t, w.t_tilde, w.area0, dt));
      last_recorded_step = steps;
    }
  }

  if (steps > 0 && last_recorded_step != steps) {
    ScalarField u_now = sht_->synthesize(w.cu);
    if (!u_now.finite()) {
      throw IntegratorError("flow: non-finite terminal state (numerical bug)");
    }
    series.states.push_back(make_state(ConformalFactor::from_log(std::move(u_now)), config.model,
                                       w.t, w.t_tilde, w.area0, last_dt));
  }

  const FlowState& last = series.states.back();
  series.final_h2_abs_max = std::max(std::abs(last.h2_min), std::abs(last.h2_max));
  series.final_roundness = last.roundness;
  series.final_roundness_normalized = last.roundness * last.area / (8.0 * kPi);
  series.steps_taken = steps;
  series.t_max_observed = t_obs;

  if (outcome == FlowOutcome::Running && config.model.kind() == ModelKind::DeSitter &&
      std::abs(last.area - kFourPi) < 1e-2 * kFourPi &&
      series.final_h2_abs_max < config.mots_h2_tol &&
      series.final_roundness < config.roundness_tol) {
    outcome = FlowOutcome::ConvergesToMots;
  }
  series.outcome = outcome;
  return series;
}

//----------------------------------------------------------------------------
// Closed forms and diagnostics
//----------------------------------------------------------------------------

std::optional<double> predict_tmax(double area0, const LightconeModel& model) {
  if (!(area0 > 0.0)) throw InvalidArgument("predict_tmax: area0 must be positive");
  switch (model.kind()) {
    case ModelKind::DeSitter:
      if (area0 < kFourPi) return 0.5 * std::log(kFourPi / (kFourPi - area0));
      return std::nullopt;
    case ModelKind::Minkowski:
      return area0 / (8.0 * kPi);
    case ModelKind::AntiDeSitter:
      return 0.5 * std::log((kFourPi + area0) / kFourPi);
    case ModelKind::ClassS:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> area_closed_form(double area0, double t, const LightconeModel& model) {
  if (!(area0 > 0.0)) throw InvalidArgument("area_closed_form: area0 must be positive");
  switch (model.kind()) {
    case ModelKind::DeSitter:
      return kFourPi + std::exp(2.0 * t) * (area0 - kFourPi);
    case ModelKind::Minkowski:
      return area0 - 8.0 * kPi * t;
    case ModelKind::AntiDeSitter:
      return (kFourPi + area0) * std::exp(-2.0 * t) - kFourPi;
    case ModelKind::ClassS:
      return std::nullopt;
  }
  return std::nullopt;
}

double area_law_check(const FlowSeries& series) {
  if (series.states.size() < 2) {
    throw InvalidArgument("area_law_check: need at least two recorded states");
  }
  if (series.model.kind() == ModelKind::ClassS) {
    throw InvalidArgument("area_law_check: no closed-form area law for a generic model");
  }
  const double area0 = series.area0();
  double worst = 0.0;
  for (const FlowState& s : series.states) {
    const double closed = *area_closed_form(area0, s.t, series.model);
    worst = std::max(worst, std::abs(s.area - closed) / std::max(std::abs(closed), 1e-300));
  }
  return worst;
}

double roundness(const Sht& sht, const ConformalFactor& w) {
  ScalarField r = scalar_curvature(sht, w);
  return r.max() - r.min();
}

double roundness_normalized(const Sht& sht, const ConformalFactor& w) {
  return roundness(sht, w) * area(w) / (8.0 * kPi);
}

double t_tilde_closed_form(double area0, double t) {
  if (!(area0 > 0.0)) throw InvalidArgument("t_tilde_closed_form: area0 must be positive");
  const double denom = kFourPi + std::exp(2.0 * t) * (area0 - kFourPi);
  if (!(denom > 0.0)) {
    throw DomainError("t_tilde_closed_form: rescaled clock undefined at/past the extinction time");
  }
  return area0 / kFourPi * (t + 0.5 * std::log(area0 / denom));
}

RescaledSeries rescale_volume_preserving(const FlowSeries& series) {
  if (series.model.kind() != ModelKind::DeSitter) {
    throw InvalidArgument("rescale_volume_preserving: defined for the de Sitter model only");
  }
  if (series.states.size() < 2) {
    throw InvalidArgument("rescale_volume_preserving: need at least two recorded states");
  }
  RescaledSeries rs;
  rs.area0 = series.area0();
  rs.states.reserve(series.states.size());
  for (const FlowState& s : series.states) {
    RescaledState r;
    r.t = s.t;
    r.t_tilde = s.t_tilde;
    r.t_tilde_closed = t_tilde_closed_form(rs.area0, s.t);
    const double c = rs.area0 / s.area;
    r.omega_tilde = ConformalFactor::from_omega(std::sqrt(c) * s.omega.omega());
    r.area = area(r.omega_tilde);
    rs.states.push_back(std::move(r));
  }
  return rs;
}

double vprf_max_residual(const Sht& sht, const RescaledSeries& rs) {
  const size_t n = rs.states.size();
  if (n < 5) throw InvalidArgument("vprf_max_residual: need at least five recorded states");
  const double mean_curv = 8.0 * kPi / rs.area0;  // average scalar curvature at fixed area
  double worst = 0.0;
  for (size_t k = 2; k + 2 < n; ++k) {
    std::vector<double> nodes(5);
    for (int j = 0; j < 5; ++j) nodes[j] = rs.states[k - 2 + j].t_tilde;
    const std::vector<double> wts = fd_weights(nodes[2], nodes, 1);
    const ScalarField& om_k = rs.states[k].omega_tilde.omega();
    ScalarField r_k = scalar_curvature(sht, rs.states[k].omega_tilde);
    for (int idx = 0; idx < om_k.size(); ++idx) {
      double dv = 0.0;
      for (int j = 0; j < 5; ++j) {
        const double om = rs.states[k - 2 + j].omega_tilde.omega()[idx];
        dv += wts[j] * om * om;
      }
      const double target = (mean_curv - r_k[idx]) * om_k[idx] * om_k[idx];
      worst = std::max(worst, std::abs(dv - target));
    }
  }
  return worst;
}

}  // namespace nullcone
