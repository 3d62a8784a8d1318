#include "gfzf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "gfzf/config.hpp"
#include "gfzf/errors.hpp"
#include "gfzf/initial_conditions.hpp"
#include "gfzf/integrate.hpp"

namespace gfzf {

Field compute_mu(const ModelSpec& model, SpectralTransform& transform, const Field& phi_np1, const Field& phi_n,
                 const Field& fprime_hat, double p, TimeScheme scheme) {
  require_same_grid(phi_np1, phi_n);
  require_same_grid(phi_np1, fprime_hat);
  Field level = phi_np1;
  if (scheme == TimeScheme::cn) level.values = 0.5 * (phi_np1.values + phi_n.values);
  Field mu = apply_multiplier(transform, level, model.linear);
  mu.values += (1.0 + p) * fprime_hat.values;
  return mu;
}

double modified_energy(const ModelSpec& model, SpectralTransform& transform, const SchemeState& state,
                       SchemeKind kind) {
  const Spectrum now = transform.forward(state.phi_n);
  const double lin = 0.5 * quadratic_form(now, model.linear);
  switch (kind) {
    case SchemeKind::sav_cn: return lin + state.r_sav * state.r_sav - model.param("C_sav");
    case SchemeKind::zf_cn: return lin + nonlinear_energy(model, state.phi_n);
    case SchemeKind::rzf_cn:
    case SchemeKind::rmzf_cn: return lin + state.R_sum();
    case SchemeKind::rzf_bdf2: {
      if (state.R_nm1.size() != state.R_n.size()) throw InvalidArgument("BDF2 modified energy needs two R levels");
      const Spectrum prev = transform.forward(state.phi_nm1);
      const Spectrum extrap = 2.0 * now - prev;
      return 0.5 * lin + 0.25 * quadratic_form(extrap, model.linear) + 1.5 * state.R_sum() -
             0.5 * state.R_prev_sum();
    }
  }
  throw InvalidArgument("unknown scheme");
}

EnergyLaw energy_law(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::zf_cn: return EnergyLaw::equality;
    case SchemeKind::rzf_bdf2: return EnergyLaw::relaxed_bdf2;
    default: return EnergyLaw::relaxed_cn;
  }
}

LawCheck check_energy_law(EnergyLaw law, double before, double after, double dissipation, double kappa,
                          double rel_tol) {
  LawCheck c;
  c.tolerance = rel_tol * std::max(1.0, std::abs(before));
  const double change = after - before;
  switch (law) {
    case EnergyLaw::equality: c.excess = std::abs(change + dissipation); break;
    case EnergyLaw::relaxed_cn: c.excess = change + (1.0 - kappa) * dissipation; break;
    case EnergyLaw::relaxed_bdf2: c.excess = change + (1.0 - 1.5 * kappa) * dissipation; break;
  }
  c.ok = std::isfinite(c.excess) && c.excess <= c.tolerance;
  return c;
}

std::vector<LawViolation> replay_energy_trace(const std::vector<StepReport>& rows, SchemeKind kind, double rel_tol) {
  std::vector<LawViolation> out;
  const EnergyLaw law = energy_law(kind);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.branch.starts_with("bootstrap_")) continue;
    const auto c = check_energy_law(law, rows[i - 1].E_mod, r.E_mod, r.dissipation, r.kappa, rel_tol);
    if (!c.ok) out.push_back({r.step, c.excess, c.tolerance});
  }
  return out;
}

std::vector<double> convergence_rates(const std::vector<double>& dt, const std::vector<double>& error) {
  if (dt.size() != error.size()) throw InvalidArgument("dt and error lists differ in length");
  std::vector<double> rate;
  for (std::size_t i = 1; i < dt.size(); ++i) {
    rate.push_back(std::log(error[i - 1] / error[i]) / std::log(dt[i - 1] / dt[i]));
  }
  return rate;
}

namespace {

Field final_field(const RunConfig& cfg, double dt) {
  Stepper stepper(model_of(cfg), options_of(cfg));
  const Field phi0 = make_initial_condition(cfg.ic, grid_of(cfg), cfg.origin, cfg.seed);
  return integrate(stepper, phi0, dt, cfg.T).state.phi_n;
}

void check_ladder(const std::vector<double>& dt_list) {
  if (dt_list.empty()) throw InvalidArgument("dt list is empty");
  for (std::size_t i = 1; i < dt_list.size(); ++i) {
    if (!(dt_list[i] < dt_list[i - 1])) throw InvalidArgument("dt list must be strictly descending");
  }
}

ConvergenceTable tabulate(const RunConfig& cfg, const std::vector<double>& dt_list,
                          std::shared_future<Field> reference) {
  std::vector<std::future<Field>> runs;
  for (double dt : dt_list) runs.push_back(std::async(std::launch::async, final_field, std::cref(cfg), dt));
  ConvergenceTable table;
  table.dt = dt_list;
  const Field& ref = reference.get();
  for (auto& r : runs) table.error.push_back(max_abs_difference(r.get(), ref));
  table.rate = convergence_rates(table.dt, table.error);
  return table;
}

}  // namespace

ConvergenceTable convergence_study(const RunConfig& cfg, const std::vector<double>& dt_list, double reference_dt) {
  check_ladder(dt_list);
  if (!(reference_dt > 0.0 && reference_dt < dt_list.back() / 10.0)) {
    throw InvalidArgument("reference_dt must be below a tenth of the smallest dt");
  }
  std::shared_future<Field> ref = std::async(std::launch::async, final_field, std::cref(cfg), reference_dt).share();
  return tabulate(cfg, dt_list, ref);
}

ConvergenceTable convergence_against(const RunConfig& cfg, const std::vector<double>& dt_list, const Field& reference) {
  check_ladder(dt_list);
  std::promise<Field> p;
  p.set_value(reference);
  return tabulate(cfg, dt_list, p.get_future().share());
}

}  // namespace gfzf
