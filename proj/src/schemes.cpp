#include "gfzf/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "gfzf/diagnostics.hpp"
#include "gfzf/errors.hpp"
#include "gfzf/relaxation.hpp"

namespace gfzf {

namespace {

double half_quadratic(const Spectrum& s, const FourierMultiplier& m) { return 0.5 * quadratic_form(s, m); }

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Field sum_fields(const std::vector<Field>& fs) {
  Field out(fs.front().grid);
  for (const auto& f : fs) out.values += f.values;
  return out;
}

std::vector<double> term_integrals(const ModelSpec& model, const Field& phi) {
  std::vector<double> out(model.terms.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = f_integral(model, j, phi);
  return out;
}

// phi^{n+1} = phi_bar + sum_j c_j q_j, its spectrum, mu and the dissipation.
struct Update {
  Field phi;
  Spectrum phi_hat;
  Spectrum mu_hat;
  double dissipation = 0.0;
};

Update correct(const StepContext& ctx, const Predictor& pr, const std::vector<double>& c, double dt,
               TimeScheme scheme) {
  const auto& m = ctx.model;
  Update u{pr.phi_bar, pr.phi_bar_hat, {}, 0.0};
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0.0) continue;
    u.phi.values += c[j] * pr.q[j].values;
    u.phi_hat += c[j] * pr.q_hat[j];
  }
  if (scheme == TimeScheme::cn) {
    u.mu_hat = (0.5 * m.linear.symbol) * (u.phi_hat + pr.phi_n_hat);
  } else {
    u.mu_hat = m.linear.symbol * u.phi_hat;
  }
  for (std::size_t j = 0; j < c.size(); ++j) u.mu_hat += (1.0 + c[j]) * pr.fprime_spec[j];
  u.dissipation = dt * quadratic_form(u.mu_hat, m.mobility);
  if (scheme == TimeScheme::bdf2) {
    const Spectrum d2 = u.phi_hat - 2.0 * pr.phi_n_hat + pr.phi_nm1_hat;
    u.dissipation += 0.25 * quadratic_form(d2, m.linear);
  }
  return u;
}

double bdf2_energy(const ModelSpec& m, const Spectrum& now, const Spectrum& prev, double r_now, double r_prev) {
  const Spectrum extrap = 2.0 * now - prev;
  return 0.25 * quadratic_form(now, m.linear) + 0.25 * quadratic_form(extrap, m.linear) + 1.5 * r_now -
         0.5 * r_prev;
}

void enforce_law(const StepContext& ctx, EnergyLaw law, double before, double after, double dissipation,
                 double kappa, const SchemeState& state, std::string_view scheme) {
  if (!ctx.options.assertions) return;
  const auto check = check_energy_law(law, before, after, dissipation, kappa);
  if (check.ok) return;
  std::ostringstream msg;
  msg.precision(17);
  msg << scheme << " step " << state.step + 1 << " (t=" << state.t << "): ";
  if (law == EnergyLaw::equality) {
    msg << "original energy law E' - E = -dt(G mu, mu)";
  } else if (law == EnergyLaw::relaxed_bdf2) {
    msg << "modified energy law E_mod' - E_mod <= -(1 - 3/2 kappa) dissipation";
  } else {
    msg << "modified energy law E_mod' - E_mod <= -(1 - kappa) dissipation";
  }
  msg << " violated by " << check.excess << " (tolerance " << check.tolerance << ")";
  throw AssertionFailure(msg.str());
}

void require_finite(const Update& u, const std::vector<double>& F_terms, double aux, const SchemeState& state,
                    std::string_view scheme) {
  bool ok = u.phi.all_finite() && std::isfinite(u.dissipation) && std::isfinite(aux);
  for (double f : F_terms) ok = ok && std::isfinite(f);
  if (ok) return;
  std::ostringstream msg;
  msg << scheme << " step " << state.step + 1 << " (t=" << state.t << ") produced a non-finite state";
  throw AssertionFailure(msg.str());
}

void commit(SchemeState& state, Update&& u, std::vector<double> R_next, double eta_next, double dt) {
  state.phi_nm1 = std::move(state.phi_n);
  state.phi_n = std::move(u.phi);
  state.R_nm1 = std::move(state.R_n);
  state.R_n = std::move(R_next);
  state.eta_nm1 = state.eta_n;
  state.eta_n = eta_next;
  state.t += dt;
  ++state.step;
}

std::string branch_label(Branch b, FallbackReason why, std::string& note) {
  if (b == Branch::fallback) note = std::string("fallback: ") + std::string(to_string(why));
  return std::string(to_string(b));
}

void require_terms(const ModelSpec& m, std::size_t n, std::string_view scheme) {
  if (m.terms.size() != n) {
    throw InvalidArgument(std::string(scheme) + " needs a model with " + std::to_string(n) +
                          " nonlinear term(s); '" + m.name + "' has " + std::to_string(m.terms.size()));
  }
}

// One relaxed step for the single-factor schemes (RZF-CN and RZF-BDF2).
StepReport relaxed_single(const StepContext& ctx, SchemeState& state, double dt, TimeScheme scheme) {
  const auto& m = ctx.model;
  const bool cn = scheme == TimeScheme::cn;
  const int mult = cn ? 1 : 3;
  const Predictor pr = predict(ctx, state, dt, scheme);
  const Field g = sum_fields(pr.fprime_hat);
  const Field q = sum_fields(pr.q);

  Field hist = pr.phi_bar;
  if (cn) {
    hist.values -= state.phi_n.values;
  } else {
    hist.values = 3.0 * pr.phi_bar.values - 4.0 * state.phi_n.values + state.phi_nm1.values;
  }
  const double s0 = inner_product(g, hist);
  const double s1 = inner_product(g, q);
  std::vector<double> R_tilde = term_integrals(m, pr.phi_bar);
  const double Rn = state.R_sum();
  const double Rnm1 = state.R_prev_sum();
  const double drift = cn ? sum(R_tilde) - Rn : 3.0 * sum(R_tilde) - 4.0 * Rn + Rnm1;

  const AffineFactor factor = affine_factor_form(ctx.options.factor, scheme, dt, state.eta_n, state.eta_nm1);
  const QuadraticCoeffs qc = assemble_quadratic(s0, s1, drift, factor, mult);
  const ZeroFactorSolution sol = solve_zero_factor(qc, factor, drift, s0, s1, mult);

  StepReport rep;
  if (sol.branch == Branch::fallback) {
    // Redefine R_tilde so the consistency equation holds at the chosen p.
    for (std::size_t j = 0; j < R_tilde.size(); ++j) {
      const double s0j = inner_product(pr.fprime_hat[j], hist);
      const double s1j = inner_product(pr.fprime_hat[j], q);
      const double dj = (1.0 + sol.p) * (s0j + mult * sol.p * s1j);
      R_tilde[j] = cn ? state.R_n[j] + dj : (4.0 * state.R_n[j] - state.R_nm1[j] + dj) / 3.0;
    }
  }
  const double drift_used = cn ? sum(R_tilde) - Rn : 3.0 * sum(R_tilde) - 4.0 * Rn + Rnm1;
  rep.consistency_residual = consistency_residual(sol.p, drift_used, s0, s1, mult);

  Update u = correct(ctx, pr, std::vector<double>(m.terms.size(), sol.p), dt, scheme);
  const std::vector<double> F_terms = term_integrals(m, u.phi);
  require_finite(u, F_terms, sum(R_tilde), state, cn ? "rzf_cn" : "rzf_bdf2");
  const double F_int = sum(F_terms);
  const RelaxationInputs in{sum(R_tilde), F_int, u.dissipation};
  const RelaxationChoice rc = cn ? choose_relaxation_cn(in) : choose_relaxation_bdf2(in);
  std::vector<double> R_next(F_terms.size());
  for (std::size_t j = 0; j < R_next.size(); ++j) R_next[j] = relax_R(rc.lambda0, R_tilde[j], F_terms[j]);

  const double lin_next = half_quadratic(u.phi_hat, m.linear);
  double before = 0.0;
  double after = 0.0;
  if (cn) {
    before = half_quadratic(pr.phi_n_hat, m.linear) + Rn;
    after = lin_next + sum(R_next);
  } else {
    before = bdf2_energy(m, pr.phi_n_hat, pr.phi_nm1_hat, Rn, Rnm1);
    after = bdf2_energy(m, u.phi_hat, pr.phi_n_hat, sum(R_next), Rn);
  }
  enforce_law(ctx, cn ? EnergyLaw::relaxed_cn : EnergyLaw::relaxed_bdf2, before, after, u.dissipation, rc.kappa,
              state, cn ? "rzf_cn" : "rzf_bdf2");

  rep.step = state.step + 1;
  rep.t = state.t + dt;
  rep.p_value = sol.p;
  rep.lambda0 = rc.lambda0;
  rep.kappa = rc.kappa;
  rep.branch = branch_label(sol.branch, sol.reason, rep.note);
  rep.E_orig = lin_next + F_int;
  rep.E_mod = after;
  rep.dissipation = u.dissipation;
  rep.R_tilde = sum(R_tilde);
  rep.F_int = F_int;
  rep.R = sum(R_next);
  commit(state, std::move(u), std::move(R_next), sol.u, dt);
  return rep;
}

}  // namespace

// ---------------------------------------------------------------- naming

SchemeKind parse_scheme(std::string_view name) {
  if (name == "sav_cn") return SchemeKind::sav_cn;
  if (name == "zf_cn") return SchemeKind::zf_cn;
  if (name == "rzf_cn") return SchemeKind::rzf_cn;
  if (name == "rzf_bdf2") return SchemeKind::rzf_bdf2;
  if (name == "rmzf_cn") return SchemeKind::rmzf_cn;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::sav_cn: return "sav_cn";
    case SchemeKind::zf_cn: return "zf_cn";
    case SchemeKind::rzf_cn: return "rzf_cn";
    case SchemeKind::rzf_bdf2: return "rzf_bdf2";
    case SchemeKind::rmzf_cn: return "rmzf_cn";
  }
  return "rzf_cn";
}

TimeScheme time_scheme(SchemeKind kind) {
  return kind == SchemeKind::rzf_bdf2 ? TimeScheme::bdf2 : TimeScheme::cn;
}

double SchemeState::R_sum() const { return sum(R_n); }
double SchemeState::R_prev_sum() const { return sum(R_nm1); }

// ---------------------------------------------------------------- predictor

Predictor predict(const StepContext& ctx, const SchemeState& state, double dt, TimeScheme scheme) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const auto& m = ctx.model;
  auto& tr = ctx.transform;
  require_same_grid(state.phi_n, state.phi_nm1);
  if (!(state.phi_n.grid == m.grid())) throw GridMismatch();
  if (!state.phi_n.all_finite()) throw InvalidArgument("state field is not finite");

  const bool cn = scheme == TimeScheme::cn;
  const GridSpec& grid = m.grid();
  const Eigen::ArrayXd gl = m.mobility.symbol * m.linear.symbol;
  const FourierMultiplier A{grid, cn ? (1.0 + 0.5 * dt * gl).eval() : (3.0 + 2.0 * dt * gl).eval()};
  {
    std::ostringstream what;
    what << "step operator A at dt=" << dt;
    A.require_invertible(what.str());
  }

  Predictor pr;
  pr.phi_hat = Field(grid, cn ? (1.5 * state.phi_n.values - 0.5 * state.phi_nm1.values).eval()
                              : (2.0 * state.phi_n.values - state.phi_nm1.values).eval());
  pr.phi_n_hat = tr.forward(state.phi_n);
  Spectrum rhs;
  if (cn) {
    rhs = (1.0 - 0.5 * dt * gl) * pr.phi_n_hat;
  } else {
    pr.phi_nm1_hat = tr.forward(state.phi_nm1);
    rhs = 4.0 * pr.phi_n_hat - pr.phi_nm1_hat;
  }

  const double qscale = cn ? -dt : -2.0 * dt;
  const Eigen::ArrayXd gain = qscale * m.mobility.symbol / A.symbol;
  for (std::size_t j = 0; j < m.terms.size(); ++j) {
    Field g = f_prime(m, j, pr.phi_hat);
    Spectrum gs = tr.forward(g);
    if (ctx.dealias != nullptr) {
      gs *= ctx.dealias->symbol;
      g = tr.inverse(gs);
    }
    Spectrum qs = gain * gs;
    pr.q.push_back(tr.inverse(qs));
    pr.q_hat.push_back(std::move(qs));
    pr.fprime_hat.push_back(std::move(g));
    pr.fprime_spec.push_back(std::move(gs));
  }
  pr.phi_bar_hat = rhs / A.symbol;
  for (const auto& qs : pr.q_hat) pr.phi_bar_hat += qs;
  pr.phi_bar = tr.inverse(pr.phi_bar_hat);
  return pr;
}

PredictorPair predictor_pair(const StepContext& ctx, const SchemeState& state, double dt, TimeScheme scheme,
                             std::size_t term) {
  if (term >= ctx.model.terms.size()) throw InvalidArgument("nonlinear term index out of range");
  Predictor pr = predict(ctx, state, dt, scheme);
  return {std::move(pr.phi_bar), std::move(pr.q[term]), std::move(pr.fprime_hat[term])};
}

// ---------------------------------------------------------------- steppers

StepReport step_sav_cn(const StepContext& ctx, SchemeState& state, double dt) {
  const auto& m = ctx.model;
  const double C = m.param("C_sav");
  const Predictor pr = predict(ctx, state, dt, TimeScheme::cn);
  const Field g = sum_fields(pr.fprime_hat);
  const Field q = sum_fields(pr.q);
  const double e1_hat = nonlinear_energy(m, pr.phi_hat) + C;
  if (!(e1_hat > 0.0)) throw InvalidArgument("SAV-CN needs E_1(phi_hat) + C > 0");
  const double w = std::sqrt(e1_hat);

  Field d = pr.phi_bar;
  d.values -= state.phi_n.values;
  const double s0 = inner_product(g, d);
  const double s1 = inner_product(g, q);
  const double denom = w - 0.25 * s1 / w;
  if (denom == 0.0) throw InvalidArgument("SAV-CN scalar equation is singular");
  const double xi = (state.r_sav + 0.25 * s0 / w - 0.25 * s1 / w) / denom;
  const double P = xi - 1.0;
  const double r_next = state.r_sav + 0.5 * (s0 + P * s1) / w;

  Update u = correct(ctx, pr, std::vector<double>(m.terms.size(), P), dt, TimeScheme::cn);
  const std::vector<double> F_terms = term_integrals(m, u.phi);
  require_finite(u, F_terms, r_next, state, "sav_cn");
  const double lin_next = half_quadratic(u.phi_hat, m.linear);
  const double before = half_quadratic(pr.phi_n_hat, m.linear) + state.r_sav * state.r_sav - C;
  const double after = lin_next + r_next * r_next - C;
  enforce_law(ctx, EnergyLaw::relaxed_cn, before, after, u.dissipation, 0.0, state, "sav_cn");

  StepReport rep;
  rep.step = state.step + 1;
  rep.t = state.t + dt;
  rep.p_value = P;
  rep.branch = "linear_solve";
  rep.F_int = sum(F_terms);
  rep.E_orig = lin_next + rep.F_int;
  rep.E_mod = after;
  rep.dissipation = u.dissipation;
  rep.R = r_next * r_next - C;
  rep.R_tilde = rep.R;
  state.r_sav = r_next;
  commit(state, std::move(u), F_terms, state.eta_n, dt);
  return rep;
}

StepReport step_zf_cn(const StepContext& ctx, SchemeState& state, double dt) {
  const auto& m = ctx.model;
  const Predictor pr = predict(ctx, state, dt, TimeScheme::cn);
  const Field g = sum_fields(pr.fprime_hat);
  const Field q = sum_fields(pr.q);
  Field d = pr.phi_bar;
  d.values -= state.phi_n.values;
  const double s0 = inner_product(g, d);
  const double s1 = inner_product(g, q);
  const double E1n = nonlinear_energy(m, state.phi_n);
  const double En = half_quadratic(pr.phi_n_hat, m.linear) + E1n;
  const double tol = ctx.options.newton_tol * std::max(1.0, std::abs(En));

  Field trial = pr.phi_bar;
  const auto at = [&](double p) -> const Field& {
    trial.values = pr.phi_bar.values + p * q.values;
    return trial;
  };
  const auto G = [&](double p) { return nonlinear_energy(m, at(p)) - E1n - (1.0 + p) * (s0 + p * s1); };
  const auto dG = [&](double p) {
    double slope = 0.0;
    for (std::size_t j = 0; j < m.terms.size(); ++j) slope += inner_product(f_prime(m, j, at(p)), q);
    return slope - s0 - s1 - 2.0 * p * s1;
  };

  const AffineFactor factor = affine_factor_form(ctx.options.factor, TimeScheme::cn, dt, state.eta_n, state.eta_nm1);
  double p = factor.value(state.eta_n);
  double res = G(p);
  int iters = 0;
  bool converged = std::abs(res) <= tol;
  while (!converged && iters < ctx.options.newton_max_iter) {
    const double slope = dG(p);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    p -= res / slope;
    ++iters;
    res = G(p);
    if (!std::isfinite(res)) break;
    converged = std::abs(res) <= tol;
  }

  std::string branch = "newton";
  if (!converged) {
    // Bracketing scan on [-2, 2], bracket nearest p = 0, then bisection.
    double best_lo = 0.0, best_hi = 0.0, best_dist = std::numeric_limits<double>::infinity();
    double prev_p = -2.0, prev_g = G(prev_p);
    for (int i = 1; i <= 400; ++i) {
      const double pi = -2.0 + 0.01 * i;
      const double gi = G(pi);
      if (std::isfinite(prev_g) && std::isfinite(gi) && (prev_g == 0.0 || prev_g * gi < 0.0)) {
        const double dist = std::min(std::abs(prev_p), std::abs(pi));
        if (dist < best_dist) {
          best_dist = dist;
          best_lo = prev_p;
          best_hi = pi;
        }
      }
      prev_p = pi;
      prev_g = gi;
    }
    if (!std::isfinite(best_dist)) {
      throw ConvergenceFailure("ZF-CN scalar equation: Newton failed and no sign change on [-2, 2]", res);
    }
    double lo = best_lo, hi = best_hi, glo = G(lo);
    for (int i = 0; i < 200; ++i) {
      p = 0.5 * (lo + hi);
      res = G(p);
      if (std::abs(res) <= tol || hi - lo <= 1e-15 * std::max(1.0, std::abs(p))) break;
      if ((glo < 0.0) == (res < 0.0)) {
        lo = p;
        glo = res;
      } else {
        hi = p;
      }
    }
    if (!(std::abs(res) <= tol)) throw ConvergenceFailure("ZF-CN scalar equation: bisection stalled", res);
    branch = "bisection";
  }

  Update u = correct(ctx, pr, std::vector<double>(m.terms.size(), p), dt, TimeScheme::cn);
  const std::vector<double> F_terms = term_integrals(m, u.phi);
  require_finite(u, F_terms, p, state, "zf_cn");
  const double F_int = sum(F_terms);
  const double after = half_quadratic(u.phi_hat, m.linear) + F_int;
  enforce_law(ctx, EnergyLaw::equality, En, after, u.dissipation, 0.0, state, "zf_cn");

  StepReport rep;
  rep.step = state.step + 1;
  rep.t = state.t + dt;
  rep.p_value = p;
  rep.branch = branch;
  rep.note = "iterations=" + std::to_string(iters);
  rep.E_orig = after;
  rep.E_mod = after;
  rep.dissipation = u.dissipation;
  rep.R_tilde = nonlinear_energy(m, pr.phi_bar);
  rep.F_int = F_int;
  rep.R = F_int;
  rep.consistency_residual = std::abs(res);
  commit(state, std::move(u), F_terms, factor.unknown(p), dt);
  return rep;
}

StepReport step_rzf_cn(const StepContext& ctx, SchemeState& state, double dt) {
  return relaxed_single(ctx, state, dt, TimeScheme::cn);
}

StepReport step_rzf_bdf2(const StepContext& ctx, SchemeState& state, double dt) {
  return relaxed_single(ctx, state, dt, TimeScheme::bdf2);
}

StepReport step_rmzf_cn(const StepContext& ctx, SchemeState& state, double dt) {
  const auto& m = ctx.model;
  require_terms(m, 2, "rmzf_cn");
  const Predictor pr = predict(ctx, state, dt, TimeScheme::cn);
  Field d = pr.phi_bar;
  d.values -= state.phi_n.values;
  const auto& g = pr.fprime_hat;
  TwoTermScalars sc;
  sc.d1 = inner_product(g[0], d);
  sc.d2 = inner_product(g[1], d);
  sc.a11 = inner_product(g[0], pr.q[0]);
  sc.a12 = inner_product(g[0], pr.q[1]);
  sc.a21 = inner_product(g[1], pr.q[0]);
  sc.a22 = inner_product(g[1], pr.q[1]);
  sc.active1 = g[0].values.abs().maxCoeff() > 0.0;
  sc.active2 = g[1].values.abs().maxCoeff() > 0.0;

  std::vector<double> R_tilde = term_integrals(m, pr.phi_bar);
  const double Rn = state.R_sum();
  const double drift = sum(R_tilde) - Rn;
  const AffineFactor f1 = affine_factor_form(ctx.options.factor, TimeScheme::cn, dt, state.eta_n, state.eta_nm1);
  const AffineFactor f2 = affine_factor_form(ctx.options.factor2, TimeScheme::cn, dt, state.eta_n, state.eta_nm1);
  const TwoFactorSolution sol = solve_two_factor(sc, f1, f2, drift, state.eta_n);
  if (sol.branch == Branch::fallback) {
    R_tilde[0] = state.R_n[0] + (1.0 + sol.p) * (sc.d1 + sol.p * sc.a11 + sol.s * sc.a12);
    R_tilde[1] = state.R_n[1] + (1.0 + sol.s) * (sc.d2 + sol.p * sc.a21 + sol.s * sc.a22);
  }

  StepReport rep;
  rep.consistency_residual = std::abs(sum(R_tilde) - Rn - two_factor_rhs(sc, sol.p, sol.s));
  Update u = correct(ctx, pr, {sol.p, sol.s}, dt, TimeScheme::cn);
  const std::vector<double> F_terms = term_integrals(m, u.phi);
  require_finite(u, F_terms, sum(R_tilde), state, "rmzf_cn");
  const double F_int = sum(F_terms);
  const RelaxationChoice rc = choose_relaxation_cn({sum(R_tilde), F_int, u.dissipation});
  std::vector<double> R_next{relax_R(rc.lambda0, R_tilde[0], F_terms[0]), relax_R(rc.lambda0, R_tilde[1], F_terms[1])};
  const double lin_next = half_quadratic(u.phi_hat, m.linear);
  const double before = half_quadratic(pr.phi_n_hat, m.linear) + Rn;
  const double after = lin_next + sum(R_next);
  enforce_law(ctx, EnergyLaw::relaxed_cn, before, after, u.dissipation, rc.kappa, state, "rmzf_cn");

  rep.step = state.step + 1;
  rep.t = state.t + dt;
  rep.p_value = sol.p;
  rep.s_value = sol.s;
  rep.lambda0 = rc.lambda0;
  rep.kappa = rc.kappa;
  rep.branch = branch_label(sol.branch, sol.reason, rep.note);
  rep.E_orig = lin_next + F_int;
  rep.E_mod = after;
  rep.dissipation = u.dissipation;
  rep.R_tilde = sum(R_tilde);
  rep.F_int = F_int;
  rep.R = sum(R_next);
  commit(state, std::move(u), std::move(R_next), sol.u, dt);
  return rep;
}

StepReport bootstrap_first_step(const StepContext& ctx, SchemeState& state, double dt) {
  state.phi_nm1 = state.phi_n;
  state.R_nm1 = state.R_n;
  state.eta_nm1 = state.eta_n;
  StepReport rep = step_rzf_cn(ctx, state, dt);
  rep.branch = "bootstrap_" + rep.branch;
  rep.E_mod = modified_energy(ctx.model, ctx.transform, state, SchemeKind::rzf_bdf2);
  return rep;
}

// ---------------------------------------------------------------- Stepper

Stepper::Stepper(ModelSpec model, SchemeOptions options)
    : model_(std::move(model)), options_(options), transform_(model_.grid()) {
  options_.factor.validate();
  if (options_.kind == SchemeKind::rmzf_cn) {
    options_.factor2.validate();
    require_terms(model_, 2, "rmzf_cn");
  }
  if (options_.dealias) dealias_ = dealias_mask(model_.grid());
}

StepContext Stepper::context() {
  return {model_, transform_, options_, dealias_ ? &*dealias_ : nullptr};
}

SchemeState Stepper::initial_state(const Field& phi0) {
  if (!(phi0.grid == model_.grid())) throw GridMismatch();
  if (!phi0.all_finite()) throw InvalidArgument("initial condition is not finite");
  SchemeState s;
  s.phi_n = phi0;
  s.phi_nm1 = phi0;
  s.R_n = term_integrals(model_, phi0);
  s.R_nm1 = s.R_n;
  s.eta_n = options_.factor.eta_init;
  s.eta_nm1 = s.eta_n;
  const double e1 = sum(s.R_n) + model_.param("C_sav");
  s.r_sav = e1 > 0.0 ? std::sqrt(e1) : 0.0;
  return s;
}

StepReport Stepper::initial_report(const SchemeState& state) {
  StepReport rep;
  rep.step = state.step;
  rep.t = state.t;
  rep.branch = "initial";
  rep.F_int = nonlinear_energy(model_, state.phi_n);
  rep.E_orig = energy_original(model_, transform_, state.phi_n);
  rep.E_mod = modified_energy(model_, transform_, state, options_.kind);
  rep.R = options_.kind == SchemeKind::sav_cn ? state.r_sav * state.r_sav - model_.param("C_sav") : state.R_sum();
  rep.R_tilde = rep.R;
  return rep;
}

StepReport Stepper::advance(SchemeState& state, double dt) {
  const StepContext ctx = context();
  switch (options_.kind) {
    case SchemeKind::sav_cn: return step_sav_cn(ctx, state, dt);
    case SchemeKind::zf_cn: return advance_zf(state, dt, 0);
    case SchemeKind::rzf_cn: return step_rzf_cn(ctx, state, dt);
    case SchemeKind::rzf_bdf2:
      return state.step == 0 ? bootstrap_first_step(ctx, state, dt) : step_rzf_bdf2(ctx, state, dt);
    case SchemeKind::rmzf_cn: return step_rmzf_cn(ctx, state, dt);
  }
  throw InvalidArgument("unknown scheme");
}

StepReport Stepper::advance_zf(SchemeState& state, double dt, int depth) {
  try {
    return step_zf_cn(context(), state, dt);
  } catch (const ConvergenceFailure&) {
    if (depth >= options_.max_substep_depth) throw;
  }
  // Two half steps. The lagged level is interpolated to t - dt/2 so the
  // midpoint extrapolation stays second order.
  SchemeState s = state;
  s.phi_nm1.values = 0.5 * (state.phi_n.values + state.phi_nm1.values);
  const StepReport a = advance_zf(s, 0.5 * dt, depth + 1);
  const StepReport b = advance_zf(s, 0.5 * dt, depth + 1);
  s.phi_nm1 = state.phi_n;
  s.step = state.step + 1;
  s.t = state.t + dt;

  StepReport rep = b;
  rep.step = s.step;
  rep.t = s.t;
  rep.dissipation = a.dissipation + b.dissipation;
  rep.branch = "substep";
  rep.note = "dt halved at depth " + std::to_string(depth + 1);
  state = std::move(s);
  return rep;
}

}  // namespace gfzf
