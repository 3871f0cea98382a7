#include "nullcone/conformal.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"
#include "nullcone/errors.hpp"

namespace nullcone {

//============================================================================
// LightconeModel
//============================================================================

LightconeModel::LightconeModel(ModelKind kind, std::string label)
    : kind_(kind), label_(std::move(label)) {}

LightconeModel LightconeModel::minkowski() { return {ModelKind::Minkowski, "minkowski"}; }
LightconeModel LightconeModel::de_sitter() { return {ModelKind::DeSitter, "de-sitter"}; }
LightconeModel LightconeModel::anti_de_sitter() {
  return {ModelKind::AntiDeSitter, "anti-de-sitter"};
}

LightconeModel LightconeModel::generic(std::function<double(double)> h, std::string label,
                                       double bracket_lo, double bracket_hi) {
  if (!h) throw InvalidArgument("LightconeModel::generic: missing h");
  if (!(bracket_lo < bracket_hi))
    throw InvalidArgument("LightconeModel::generic: empty radial bracket");
  LightconeModel m(ModelKind::ClassS, std::move(label));
  m.h_ = std::move(h);
  m.lo_ = bracket_lo;
  m.hi_ = bracket_hi;
  return m;
}

double LightconeModel::h(double r) const {
  switch (kind_) {
    case ModelKind::Minkowski:
      return 1.0;
    case ModelKind::DeSitter:
      return 1.0 - r * r;
    case ModelKind::AntiDeSitter:
      return 1.0 + r * r;
    case ModelKind::ClassS:
      return h_(r);
  }
  throw Error("LightconeModel::h: unreachable");
}

//============================================================================
// ConformalFactor
//============================================================================

ConformalFactor ConformalFactor::from_log(ScalarField u) {
  if (!u.finite()) throw DomainError("ConformalFactor: non-finite log factor");
  ConformalFactor w;
  w.omega_ = u.map([](double v) { return std::exp(v); });
  w.u_ = std::move(u);
  return w;
}

ConformalFactor ConformalFactor::from_omega(const ScalarField& omega) {
  if (!omega.finite() || omega.min() <= 0.0)
    throw DomainError("ConformalFactor: omega must be positive and finite");
  ConformalFactor w;
  w.u_ = omega.map([](double v) { return std::log(v); });
  w.omega_ = omega;
  return w;
}

ConformalFactor ConformalFactor::constant(GridPtr grid, double b) {
  if (!(b > 0.0)) throw DomainError("ConformalFactor: constant factor must be positive");
  ConformalFactor w;
  w.u_ = ScalarField(grid, std::log(b));
  w.omega_ = ScalarField(std::move(grid), b);
  return w;
}

//============================================================================
// Geometry
//============================================================================

ScalarField scalar_curvature(const Sht& sht, const ConformalFactor& w) {
  if (!w.grid().same_layout(sht.grid()))
    throw InvalidArgument("scalar_curvature: transform grid mismatch");
  ScalarField lap = sht.laplacian(w.u());
  ScalarField out(w.grid_ptr());
  const auto& om = w.omega();
  for (int i = 0; i < out.size(); ++i) out[i] = (2.0 - 2.0 * lap[i]) / (om[i] * om[i]);
  return out;
}

double area(const ConformalFactor& w) { return (w.omega() * w.omega()).integrate(); }

double area_radius(double area_value) {
  if (!(area_value >= 0.0)) throw DomainError("area_radius: negative area");
  return std::sqrt(area_value / (4.0 * std::numbers::pi));
}

ConformalFactor rescaled_to_area(const ConformalFactor& w, double target_area) {
  if (!(target_area > 0.0) || !std::isfinite(target_area)) {
    throw InvalidArgument("rescaled_to_area: target area must be positive and finite");
  }
  const double c = std::sqrt(target_area / area(w));
  return ConformalFactor::from_omega(c * w.omega());
}

namespace {
// Gauss equation applied to an already-computed curvature field.
ScalarField h2_from_curvature(const ScalarField& r, const ConformalFactor& w,
                              const LightconeModel& model) {
  switch (model.kind()) {
    case ModelKind::Minkowski:
      return 2.0 * r;
    case ModelKind::DeSitter:
      return 2.0 * r + (-4.0);
    case ModelKind::AntiDeSitter:
      return 2.0 * r + 4.0;
    case ModelKind::ClassS:
      break;
  }
  const auto& om = w.omega();
  if (om.min() <= model.bracket_lo() || om.max() >= model.bracket_hi())
    throw DomainError("spacetime_mean_curvature: omega leaves the model's radial bracket [" +
                      std::to_string(model.bracket_lo()) + ", " +
                      std::to_string(model.bracket_hi()) + "]");
  ScalarField out(w.grid_ptr());
  for (int i = 0; i < out.size(); ++i)
    out[i] = 2.0 * r[i] - 4.0 / (om[i] * om[i]) * (1.0 - model.h(om[i]));
  return out;
}
}  // namespace

ScalarField spacetime_mean_curvature(const Sht& sht, const ConformalFactor& w,
                                     const LightconeModel& model) {
  return h2_from_curvature(scalar_curvature(sht, w), w, model);
}

namespace {
ScalarField theta_from_h2(const ScalarField& h2, const ConformalFactor& w) {
  ScalarField theta = h2;
  for (int i = 0; i < theta.size(); ++i) theta[i] *= 0.5 * w.omega()[i];
  return theta;
}
}  // namespace

NullExpansions null_expansions(const Sht& sht, const ConformalFactor& w,
                               const LightconeModel& model) {
  ScalarField h2 = spacetime_mean_curvature(sht, w, model);
  return {w.omega().map([](double v) { return 2.0 / v; }), theta_from_h2(h2, w)};
}

double gauss_bonnet_defect(const Sht& sht, const ConformalFactor& w) {
  const ScalarField r = scalar_curvature(sht, w);
  return (r * w.omega() * w.omega()).integrate() - 8.0 * std::numbers::pi;
}

const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::OuterUntrapped:
      return "outer-untrapped";
    case CausalClass::MotsCandidate:
      return "MOTS-candidate";
    case CausalClass::Trapped:
      return "trapped";
    case CausalClass::Mixed:
      return "mixed";
  }
  return "unknown";
}

CausalClass classify_causal(const ScalarField& h2, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("classify_causal: tol must be positive");
  const double lo = h2.min(), hi = h2.max();
  if (std::max(std::abs(lo), std::abs(hi)) <= tol) return CausalClass::MotsCandidate;
  if (hi < -tol) return CausalClass::Trapped;
  if (lo > tol) return CausalClass::OuterUntrapped;
  return CausalClass::Mixed;
}

CrossSectionReport cross_section_report(const Sht& sht, const ConformalFactor& w,
                                        const LightconeModel& model, double tol) {
  CrossSectionReport rep;
  rep.area = area(w);
  rep.scalar_curv = scalar_curvature(sht, w);
  rep.h2 = h2_from_curvature(rep.scalar_curv, w, model);
  rep.theta_bar = w.omega().map([](double v) { return 2.0 / v; });
  rep.theta = theta_from_h2(rep.h2, w);
  rep.gauss_bonnet = (rep.scalar_curv * w.omega() * w.omega()).integrate() - 8.0 * std::numbers::pi;
  rep.causal_class = classify_causal(rep.h2, tol);
  return rep;
}

std::string CrossSectionReport::to_json() const {
  nlohmann::json j;
  j["area"] = area;
  j["area_radius"] = area_radius(area);
  j["R_min"] = scalar_curv.min();
  j["R_max"] = scalar_curv.max();
  j["H2_min"] = h2.min();
  j["H2_max"] = h2.max();
  j["theta_min"] = theta.min();
  j["theta_max"] = theta.max();
  j["gauss_bonnet_defect"] = gauss_bonnet;
  j["causal_class"] = to_string(causal_class);
  return j.dump(2);
}

}  // namespace nullcone
