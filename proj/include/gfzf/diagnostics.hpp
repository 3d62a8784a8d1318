#pragma once

#include <string>
#include <vector>

#include "gfzf/field.hpp"
#include "gfzf/model.hpp"
#include "gfzf/schemes.hpp"
#include "gfzf/spectral.hpp"

namespace gfzf {

struct RunConfig;

/// cn:   mu = L(phi^{n+1} + phi^n)/2 + (1+p) F'(phi_hat)
/// bdf2: mu = L phi^{n+1} + (1+p) F'(phi_hat)
Field compute_mu(const ModelSpec& model, SpectralTransform& transform, const Field& phi_np1,
                 const Field& phi_n, const Field& fprime_hat, double p, TimeScheme scheme);

/// Scheme-specific modified energy of the state's current level.
///
///   sav_cn             (L phi, phi)/2 + r^2 - C
///   zf_cn              E(phi)
///   rzf_cn, rmzf_cn    (L phi, phi)/2 + sum R
///   rzf_bdf2           (L phi^n, phi^n)/4 + (L(2phi^n - phi^{n-1}), .)/4 + 3/2 R^n - 1/2 R^{n-1}
double modified_energy(const ModelSpec& model, SpectralTransform& transform, const SchemeState& state,
                       SchemeKind kind);

/// The per-step energy inequality a scheme guarantees:
///   relaxed:  E_mod' - E_mod <= -(1 - c kappa) dissipation,  c = 1 (cn) or 3/2 (bdf2)
///   equality: |E' - E + dissipation| small (ZF-CN)
enum class EnergyLaw { relaxed_cn, relaxed_bdf2, equality };

EnergyLaw energy_law(SchemeKind kind);

struct LawCheck {
  bool ok = true;
  /// Amount by which the inequality is violated (<= 0 when satisfied exactly).
  double excess = 0.0;
  double tolerance = 0.0;
};

/// Tolerance is rel_tol * max(1, |before|).
LawCheck check_energy_law(EnergyLaw law, double before, double after, double dissipation, double kappa,
                          double rel_tol = 1e-9);

struct LawViolation {
  long step = 0;
  double excess = 0.0;
  double tolerance = 0.0;
};

/// Re-checks every consecutive row pair of a trace. Rows whose branch starts
/// with "bootstrap_" are skipped (their law is the CN one, in another energy).
std::vector<LawViolation> replay_energy_trace(const std::vector<StepReport>& rows, SchemeKind kind,
                                              double rel_tol = 1e-9);

struct ConvergenceTable {
  std::vector<double> dt;
  std::vector<double> error;
  std::vector<double> rate;
};

/// rate[i] = log2(error[i] / error[i+1]) scaled by the actual dt ratio.
std::vector<double> convergence_rates(const std::vector<double>& dt, const std::vector<double>& error);

/// Runs `cfg` at every dt and at reference_dt with the same scheme and
/// tabulates max-norm errors at cfg.T. dt_list must be descending and
/// reference_dt < min(dt_list) / 10.
ConvergenceTable convergence_study(const RunConfig& cfg, const std::vector<double>& dt_list,
                                   double reference_dt);

/// As convergence_study, against a supplied reference field at cfg.T.
ConvergenceTable convergence_against(const RunConfig& cfg, const std::vector<double>& dt_list,
                                     const Field& reference);

}  // namespace gfzf
