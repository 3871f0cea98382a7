#pragma once

#include <functional>
#include <limits>
#include <string>

#include "nullcone/field.hpp"
#include "nullcone/sht.hpp"

namespace nullcone {

enum class ModelKind { Minkowski, DeSitter, AntiDeSitter, ClassS };

/// A shear-free null cone background, identified by the radial profile h(r)
/// of its static metric: Minkowski h = 1, de Sitter h = 1 - r^2, anti-de
/// Sitter h = 1 + r^2, or a caller-supplied smooth h for the generic case.
/// Generic models carry a working radial bracket; geometry evaluations that
/// push the conformal factor outside it throw DomainError.
class LightconeModel {
 public:
  static LightconeModel minkowski();
  static LightconeModel de_sitter();
  static LightconeModel anti_de_sitter();
  static LightconeModel generic(std::function<double(double)> h, std::string label = "generic",
                                double bracket_lo = 0.0,
                                double bracket_hi = std::numeric_limits<double>::infinity());

  ModelKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }

  /// Metric profile h evaluated at radius r.
  double h(double r) const;

 private:
  LightconeModel(ModelKind kind, std::string label);
  ModelKind kind_;
  std::string label_;
  std::function<double(double)> h_;
  double lo_ = 0.0, hi_ = std::numeric_limits<double>::infinity();
};

/// Conformal factor omega of a cross-section metric omega^2 dOmega^2,
/// stored as u = ln omega so positivity is structural. The exponential is
/// cached because nearly every geometric formula needs both.
class ConformalFactor {
 public:
  static ConformalFactor from_log(ScalarField u);
  /// Throws DomainError unless omega > 0 everywhere.
  static ConformalFactor from_omega(const ScalarField& omega);
  static ConformalFactor constant(GridPtr grid, double b);

  const ScalarField& u() const { return u_; }
  const ScalarField& omega() const { return omega_; }
  const SphericalGrid& grid() const { return u_.grid(); }
  const GridPtr& grid_ptr() const { return u_.grid_ptr(); }

 private:
  ScalarField u_, omega_;
};

/// Gauss curvature scalar of omega^2 dOmega^2: R = (2 - 2 Delta ln omega) / omega^2.
ScalarField scalar_curvature(const Sht& sht, const ConformalFactor& w);

/// |Sigma| = integral of omega^2 over the unit sphere.
double area(const ConformalFactor& w);

/// Area radius b with |Sigma| = 4 pi b^2.
double area_radius(double area_value);

/// The homothety c * omega with c > 0 chosen so the result's area is exactly
/// target_area (up to quadrature rounding). Throws InvalidArgument unless
/// target_area > 0.
ConformalFactor rescaled_to_area(const ConformalFactor& w, double target_area);

/// Spacetime mean curvature squared from the Gauss equation of the model:
///   Minkowski  H^2 = 2R
///   de Sitter  H^2 = 2R - 4
///   anti-dS    H^2 = 2R + 4
///   generic    H^2 = 2R - (4/omega^2)(1 - h(omega))
ScalarField spacetime_mean_curvature(const Sht& sht, const ConformalFactor& w,
                                     const LightconeModel& model);

struct NullExpansions {
  ScalarField theta_bar;  // expansion along the cone, 2/omega
  ScalarField theta;      // transverse expansion, omega H^2 / 2
};
NullExpansions null_expansions(const Sht& sht, const ConformalFactor& w,
                               const LightconeModel& model);

/// integral of R dmu - 8 pi (dmu the cross-section measure); Gauss--Bonnet
/// says the exact value is 0, so this is a pure discretization diagnostic.
double gauss_bonnet_defect(const Sht& sht, const ConformalFactor& w);

enum class CausalClass { OuterUntrapped, MotsCandidate, Trapped, Mixed };
const char* to_string(CausalClass c);

/// Sign trichotomy of H^2 (equivalently of theta): everywhere above +tol,
/// everywhere below -tol, within tol of zero, or genuinely mixed.
CausalClass classify_causal(const ScalarField& h2, double tol = 1e-6);

/// Full pointwise geometry of one cross section plus scalar summaries.
struct CrossSectionReport {
  double area = 0.0;
  ScalarField scalar_curv;      // R
  ScalarField h2;               // spacetime mean curvature squared
  ScalarField theta;            // transverse null expansion
  ScalarField theta_bar;        // cone-directed null expansion
  double gauss_bonnet = 0.0;    // defect, exactly 0 in the continuum
  CausalClass causal_class = CausalClass::Mixed;

  /// Scalar summaries as a JSON object (area, extrema, defect, class).
  std::string to_json() const;
};

CrossSectionReport cross_section_report(const Sht& sht, const ConformalFactor& w,
                                        const LightconeModel& model, double tol = 1e-6);

}  // namespace nullcone
