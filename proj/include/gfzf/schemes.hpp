#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfzf/field.hpp"
#include "gfzf/model.hpp"
#include "gfzf/spectral.hpp"
#include "gfzf/zero_factor.hpp"

namespace gfzf {

enum class SchemeKind { sav_cn, zf_cn, rzf_cn, rzf_bdf2, rmzf_cn };

SchemeKind parse_scheme(std::string_view name);
std::string_view to_string(SchemeKind kind);
/// Time discretisation family of a scheme (bdf2 only for rzf_bdf2).
TimeScheme time_scheme(SchemeKind kind);

struct SchemeOptions {
  SchemeKind kind = SchemeKind::rzf_cn;
  FactorSpec factor;
  FactorSpec factor2;  // RMZF second factor S
  bool dealias = false;
  bool assertions = true;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  int max_substep_depth = 24;  // ZF-CN halvings when the scalar equation has no root
};

/// History carried between steps. R_n/R_nm1 hold one entry per nonlinear term.
struct SchemeState {
  Field phi_n;
  Field phi_nm1;
  std::vector<double> R_n;
  std::vector<double> R_nm1;
  double eta_n = 0.0;
  double eta_nm1 = 0.0;
  double r_sav = 0.0;
  double t = 0.0;
  long step = 0;

  [[nodiscard]] double R_sum() const;
  [[nodiscard]] double R_prev_sum() const;
};

struct StepReport {
  long step = 0;
  double t = 0.0;
  double p_value = 0.0;
  double s_value = 0.0;
  double lambda0 = 0.0;
  double kappa = 0.0;
  std::string branch;
  double E_orig = 0.0;
  double E_mod = 0.0;
  double dissipation = 0.0;
  double R_tilde = 0.0;
  double F_int = 0.0;
  double R = 0.0;
  /// |drift - rhs| of the scalar consistency equation (0 where not applicable).
  double consistency_residual = 0.0;
  /// Fallback reason, Newton iterations, substep notes.
  std::string note;
};

/// Everything a single step needs besides the state and dt.
struct StepContext {
  const ModelSpec& model;
  SpectralTransform& transform;
  const SchemeOptions& options;
  const FourierMultiplier* dealias = nullptr;
};

/// Output of the semi-implicit predictor. Per-term quantities are indexed by
/// nonlinear term; the spectra are kept so a step needs no further transforms.
struct Predictor {
  Field phi_hat;
  Field phi_bar;
  std::vector<Field> q;
  std::vector<Field> fprime_hat;
  Spectrum phi_n_hat;
  Spectrum phi_nm1_hat;  // bdf2 only
  Spectrum phi_bar_hat;
  std::vector<Spectrum> q_hat;
  std::vector<Spectrum> fprime_spec;
};

/// cn:   A = I + dt/2 GL, phi_bar = A^{-1}[(I - dt/2 GL) phi^n - dt G F'(phi_hat)],
///       q_j = -dt A^{-1} G F_j'(phi_hat), phi_hat = 3/2 phi^n - 1/2 phi^{n-1}.
/// bdf2: A = 3I + 2dt GL, phi_bar = A^{-1}[4 phi^n - phi^{n-1} - 2dt G F'(phi_hat)],
///       q_j = -2dt A^{-1} G F_j'(phi_hat), phi_hat = 2 phi^n - phi^{n-1}.
/// F' in phi_bar is the sum over all terms. Throws SingularOperator if A is not invertible.
Predictor predict(const StepContext& ctx, const SchemeState& state, double dt, TimeScheme scheme);

struct PredictorPair {
  Field phi_bar;
  Field q;
  Field fprime_hat;
};

/// Single-term view of predict().
PredictorPair predictor_pair(const StepContext& ctx, const SchemeState& state, double dt,
                             TimeScheme scheme, std::size_t term = 0);

/// Each stepper advances `state` in place by dt and describes the step. When
/// assertions are on, a violated energy law throws AssertionFailure.
StepReport step_sav_cn(const StepContext& ctx, SchemeState& state, double dt);
/// Throws ConvergenceFailure when neither Newton nor the bracketing search converges.
StepReport step_zf_cn(const StepContext& ctx, SchemeState& state, double dt);
StepReport step_rzf_cn(const StepContext& ctx, SchemeState& state, double dt);
StepReport step_rzf_bdf2(const StepContext& ctx, SchemeState& state, double dt);
StepReport step_rmzf_cn(const StepContext& ctx, SchemeState& state, double dt);

/// Sets phi^{-1} = phi^0 and takes one RZF-CN step, so a BDF2 run has two levels.
/// The report's branch carries a "bootstrap_" prefix and its E_mod is the BDF2 form.
StepReport bootstrap_first_step(const StepContext& ctx, SchemeState& state, double dt);

/// Owns a model, its transform and the options; drives one simulation.
class Stepper {
 public:
  Stepper(ModelSpec model, SchemeOptions options);

  [[nodiscard]] const ModelSpec& model() const noexcept { return model_; }
  [[nodiscard]] const SchemeOptions& options() const noexcept { return options_; }
  SpectralTransform& transform() noexcept { return transform_; }
  [[nodiscard]] StepContext context();

  /// Level 0 state: phi^{-1} = phi^0, R^0 = (F_j(phi^0), 1), eta from the factor,
  /// r = sqrt(E_1(phi^0) + C).
  SchemeState initial_state(const Field& phi0);
  /// Row describing level 0 (branch "initial", E_mod = E_orig).
  StepReport initial_report(const SchemeState& state);

  /// One accepted step of size dt. Handles the BDF2 bootstrap and, for ZF-CN,
  /// recursive halving of dt when the scalar solve fails.
  StepReport advance(SchemeState& state, double dt);

 private:
  StepReport advance_zf(SchemeState& state, double dt, int depth);

  ModelSpec model_;
  SchemeOptions options_;
  SpectralTransform transform_;
  std::optional<FourierMultiplier> dealias_;
};

}  // namespace gfzf
