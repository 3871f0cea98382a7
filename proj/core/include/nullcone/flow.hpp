#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nullcone/conformal.hpp"
#include "nullcone/sht.hpp"

namespace nullcone {

enum class FlowScheme { Rk4Explicit, ImexSbdf2 };
const char* to_string(FlowScheme s);

enum class FlowOutcome { Running, ShrinksToTip, ConvergesToMots, ExpandsToInfinity };
const char* to_string(FlowOutcome o);

/// Knobs of one flow run. Defaults target the 64x128 working grid.
struct FlowConfig {
  LightconeModel model = LightconeModel::de_sitter();
  FlowScheme scheme = FlowScheme::Rk4Explicit;
  double dt_init = 1e-2;        // accuracy ceiling on the step size
  double cfl_safety = 0.5;      // in (0,1]: fraction of the RK4 diffusive stability bound
  double t_end = 10.0;
  double stop_area_floor = 4.0 * 3.14159265358979323846 * 1e-4;
  double stop_area_ceiling = 4.0 * 3.14159265358979323846 * 100.0;
  double roundness_tol = 1e-4;  // max R - min R certifying a round limit
  double mots_h2_tol = 1e-4;    // |H^2| ceiling certifying a MOTS limit
  int record_every = 100;       // record one state every N accepted steps
  double area_rate_safety = 0.02;  // IMEX: max relative area change per step

  /// Throws InvalidArgument on non-positive steps/tolerances or
  /// cfl_safety outside (0, 1].
  void validate() const;
};

/// One recorded snapshot of the evolving cross section with its scalar
/// diagnostics. t_tilde is the accumulated area-rescaled clock (the running
/// integral of area0/area); t_hat = (1 - e^{-2t})/2 is the Ricci-flow clock.
/// Both are recorded for every model; their geometric meaning is specific to
/// the de Sitter cone.
struct FlowState {
  double t = 0.0;
  ConformalFactor omega;
  double area = 0.0;
  double r_min = 0.0, r_max = 0.0;    // scalar curvature extrema
  double h2_min = 0.0, h2_max = 0.0;  // spacetime mean curvature squared extrema
  double roundness = 0.0;             // r_max - r_min
  double t_tilde = 0.0;
  double t_hat = 0.0;
  double dt = 0.0;                    // step size in force when recorded
  double area0 = -1.0;                // reference area of the run this state belongs to
  std::optional<double> area_closed;  // closed-form area, for models that have one
};

/// Result of a run: recorded states (strictly increasing t), the outcome of
/// the shrink/steady/expand trichotomy, and the certificates backing it.
struct FlowSeries {
  LightconeModel model = LightconeModel::de_sitter();
  FlowScheme scheme = FlowScheme::Rk4Explicit;
  std::vector<FlowState> states;
  FlowOutcome outcome = FlowOutcome::Running;
  std::optional<double> t_max_observed;   // extinction time when ShrinksToTip
  std::optional<double> t_max_predicted;  // closed form, when the model has one
  double final_h2_abs_max = 0.0;
  double final_roundness = 0.0;
  double final_roundness_normalized = 0.0;
  long long steps_taken = 0;

  double area0() const;

  /// Columns: t, area, area_closed_form, R_min, R_max, H2_min, H2_max,
  /// roundness, t_tilde, t_hat, dt. Plain %.17g, deterministic.
  void write_csv(std::ostream& os) const;

  /// Outcome plus certificates as a JSON object (no trailing newline).
  std::string summary_json() const;
};

/// Pseudo-spectral integrator for the cone flow d(omega)/dt = -omega H^2/4,
/// evolved in u = ln omega where it reads du/dt = e^{-2u}(Delta u - h(e^u)).
///
/// The nonlinear right-hand side is evaluated on a 3/2-rule refined grid
/// (quadratic aliasing removed; the transcendental remainder falls with the
/// spectral tail), then re-expanded at the working band limit. Explicit RK4
/// with a diffusive CFL bound is the default; an IMEX SBDF2 scheme with the
/// stiff Laplacian handled implicitly (spectrally diagonal) is available for
/// extinction tails. Instances are immutable and thread-safe; the referenced
/// Sht must outlive the engine.
class FlowEngine {
 public:
  explicit FlowEngine(const Sht& sht);
  ~FlowEngine();

  FlowEngine(const FlowEngine&) = delete;
  FlowEngine& operator=(const FlowEngine&) = delete;

  const Sht& sht() const { return *sht_; }
  const Sht& padded_sht() const;

  /// Nodewise -omega H^2 / 4 on the working grid. Throws DomainError when a
  /// ClassS model's conformal factor leaves its radial bracket.
  ScalarField rhs(const ConformalFactor& w, const LightconeModel& model) const;

  /// Diagnostics snapshot of an arbitrary cross section (area, curvature and
  /// H^2 extrema, clocks) under the given model.
  FlowState make_state(const ConformalFactor& w, const LightconeModel& model, double t = 0.0,
                       double t_tilde = 0.0, double area0 = -1.0, double dt = 0.0) const;

  /// One accepted step of the configured scheme from an arbitrary state
  /// (IMEX runs start multistep history from scratch, i.e. this performs the
  /// first-order bootstrap step). Step size is the same adaptive choice run()
  /// would make. Throws IntegratorError on non-finite data.
  FlowState step(const FlowState& s, const FlowConfig& config) const;

  /// Integrate from w0 at t = 0 until t_end, the area floor (ShrinksToTip),
  /// or the area ceiling (ExpandsToInfinity). Reaching t_end yields
  /// ConvergesToMots when the de Sitter MOTS certificates hold, Running
  /// otherwise. A shrink that disagrees with the model's closed-form
  /// extinction time by more than 2% -- or any non-finite state with the area
  /// still above the floor -- throws IntegratorError instead of
  /// misreporting physics.
  FlowSeries run(const ConformalFactor& w0, const FlowConfig& config) const;

 private:
  struct Impl;
  const Sht* sht_;
  std::unique_ptr<Impl> impl_;
};

/// Closed-form singularity time, when the model guarantees one:
///   de Sitter  0.5 ln(4pi/(4pi - A0)) for A0 < 4pi, none otherwise
///   Minkowski  A0 / 8pi
///   anti-dS    0.5 ln((4pi + A0)/4pi)
/// ClassS models have no closed form (empty).
std::optional<double> predict_tmax(double area0, const LightconeModel& model);

/// Closed-form area at time t for the named models:
///   de Sitter  4pi + e^{2t}(A0 - 4pi)
///   Minkowski  A0 - 8pi t
///   anti-dS    (4pi + A0) e^{-2t} - 4pi
/// ClassS models have none (empty).
std::optional<double> area_closed_form(double area0, double t, const LightconeModel& model);

/// Max over recorded states of |area - closed form| / closed form. Requires
/// at least two states and a model with a closed-form law (InvalidArgument).
double area_law_check(const FlowSeries& series);

/// Oscillation of the scalar curvature, max R - min R: zero exactly for the
/// constant-curvature (STCMC) factors.
double roundness(const Sht& sht, const ConformalFactor& w);

/// Scale-invariant version, (max R - min R) * area / (8 pi): unchanged under
/// omega -> c omega, so meaningful along expanding runs where R itself decays.
double roundness_normalized(const Sht& sht, const ConformalFactor& w);

/// The de Sitter area-rescaled clock in closed form:
///   t_tilde(t) = (A0/4pi) (t + 0.5 ln(A0 / (4pi + e^{2t}(A0 - 4pi)))).
double t_tilde_closed_form(double area0, double t);

/// One state of the volume-preserving rescaling: omega_tilde = sqrt(c) omega
/// with c = area0/area, parametrized by the rescaled clock.
struct RescaledState {
  double t = 0.0;              // original flow time
  double t_tilde = 0.0;        // numeric clock accumulated by the integrator
  double t_tilde_closed = 0.0; // closed form at the same t
  double area = 0.0;           // area of omega_tilde (constant by design)
  ConformalFactor omega_tilde;
};

struct RescaledSeries {
  double area0 = 0.0;
  std::vector<RescaledState> states;
};

/// Rescale a de Sitter series to the constant-area flow. Throws
/// InvalidArgument for other models or fewer than two states.
RescaledSeries rescale_volume_preserving(const FlowSeries& series);

/// Sup-norm residual of the volume-preserving flow equation
///   d(omega_tilde^2)/dt_tilde = (8pi/area0 - R_tilde) omega_tilde^2
/// with the time derivative taken by 5-point finite differences on the
/// recorded (nonuniform) t_tilde nodes. Requires >= 5 states.
double vprf_max_residual(const Sht& sht, const RescaledSeries& rs);

}  // namespace nullcone
