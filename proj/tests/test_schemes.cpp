#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gfzf/diagnostics.hpp"
#include "gfzf/errors.hpp"
#include "gfzf/integrate.hpp"
#include "gfzf/schemes.hpp"
#include "support.hpp"

using namespace gfzf;
using namespace gfzf::testing;

namespace {

constexpr SchemeKind kAll[] = {SchemeKind::sav_cn, SchemeKind::zf_cn, SchemeKind::rzf_cn, SchemeKind::rzf_bdf2,
                               SchemeKind::rmzf_cn};

SchemeOptions opts(SchemeKind kind) {
  SchemeOptions o;
  o.kind = kind;
  return o;
}

Field cosx(const GridSpec& g, double a = 1.0) {
  return Field::sample(g, [a](const auto& x) { return a * std::cos(x[0]); });
}

// Allen-Cahn with an extra identically-zero second term.
ModelSpec ac_with_zero_term(const GridSpec& g) {
  const ModelSpec ac = build_model("allen_cahn", {{"epsilon", 0.4}}, g);
  return make_model("ac_split", ac.linear, ac.mobility, {ac.terms[0], NonlinearTerm::zero()}, ac.params);
}

ModelSpec model_for(SchemeKind kind, std::string_view name, const GridSpec& g) {
  if (name == "heat") return build_model("heat", {{"terms", kind == SchemeKind::rmzf_cn ? 2.0 : 1.0}}, g);
  if (kind == SchemeKind::rmzf_cn) {
    if (name == "cahn_hilliard_beta") return build_model("custom_split", {{"epsilon", 0.4}}, g);
    return ac_with_zero_term(g);
  }
  if (name == "pfc") return build_model("pfc", {{"epsilon", 0.325}}, g);
  return build_model(name, {{"epsilon", 0.4}}, g);
}

std::vector<Field> run_fields(Stepper& s, const Field& phi0, double dt, int steps) {
  std::vector<Field> out{phi0};
  SchemeState st = s.initial_state(phi0);
  for (int i = 0; i < steps; ++i) {
    s.advance(st, dt);
    out.push_back(st.phi_n);
  }
  return out;
}

}  // namespace

TEST(Predictor, HeatSingleModeCn) {
  const GridSpec g = grid2(16);
  Stepper s(build_model("heat", {}, g), opts(SchemeKind::rzf_cn));
  const SchemeState st = s.initial_state(cosx(g));
  const auto pp = predictor_pair(s.context(), st, 1.0, TimeScheme::cn);
  EXPECT_LT(max_abs_difference(pp.phi_bar, cosx(g, 1.0 / 3.0)), 1e-15);
  EXPECT_EQ(pp.q.values.abs().maxCoeff(), 0.0);
}

TEST(Predictor, RootOfNonlinearityGivesPureLinearStep) {
  const GridSpec g = grid2(8);
  Stepper s(build_model("allen_cahn", {{"epsilon", 0.4}}, g), opts(SchemeKind::rzf_cn));
  const SchemeState st = s.initial_state(Field::constant(g, 1.0));
  const auto pp = predictor_pair(s.context(), st, 0.3, TimeScheme::cn);
  EXPECT_EQ(pp.q.values.abs().maxCoeff(), 0.0);
  EXPECT_LT(max_abs_difference(pp.phi_bar, Field::constant(g, 1.0)), 1e-15);
}

TEST(Predictor, ExtrapolationWithEqualLevelsIsIdentity) {
  const GridSpec g = grid2(8);
  Stepper s(build_model("allen_cahn", {{"epsilon", 0.4}}, g), opts(SchemeKind::rzf_cn));
  const SchemeState st = s.initial_state(noise(g, 3));
  for (auto ts : {TimeScheme::cn, TimeScheme::bdf2}) {
    const Predictor pr = predict(s.context(), st, 0.1, ts);
    EXPECT_LE(max_abs_difference(pr.phi_hat, st.phi_n), 1e-15);
  }
}

TEST(Predictor, PfcSingularOperatorRejected) {
  // A = 1 + dt/2 * G L vanishes on |k| = 1 where G L = -0.325
  const GridSpec g = grid2(8);
  Stepper s(build_model("pfc", {{"epsilon", 0.325}}, g), opts(SchemeKind::rzf_cn));
  SchemeState st = s.initial_state(noise(g, 1, 0.1));
  EXPECT_THROW(s.advance(st, 2.0 / 0.325), SingularOperator);
  EXPECT_NO_THROW(s.advance(st, 0.2));
}

TEST(Bootstrap, HeatSingleMode) {
  const GridSpec g = grid2(16);
  Stepper s(build_model("heat", {}, g), opts(SchemeKind::rzf_bdf2));
  SchemeState st = s.initial_state(cosx(g));
  const StepReport r1 = s.advance(st, 1.0);
  EXPECT_TRUE(r1.branch.starts_with("bootstrap_"));
  EXPECT_LT(max_abs_difference(st.phi_n, cosx(g, 1.0 / 3.0)), 1e-15);
  EXPECT_LT(max_abs_difference(st.phi_nm1, cosx(g)), 1e-15);
  const StepReport r2 = s.advance(st, 1.0);
  EXPECT_FALSE(r2.branch.starts_with("bootstrap_"));
  EXPECT_LT(max_abs_difference(st.phi_n, cosx(g, 1.0 / 15.0)), 1e-15);
}

TEST(Heat, CnFamilyIdenticalAndMatchesModalRecursion) {
  const GridSpec g = grid2(16);
  const Field phi0 = Field::sample(g, [](const auto& x) { return std::cos(x[0]) + 0.3 * std::sin(2 * x[1]); });
  const double dt = 0.1;
  std::vector<std::vector<Field>> runs;
  for (auto kind : {SchemeKind::sav_cn, SchemeKind::zf_cn, SchemeKind::rzf_cn, SchemeKind::rmzf_cn}) {
    Stepper s(model_for(kind, "heat", g), opts(kind));
    runs.push_back(run_fields(s, phi0, dt, 30));
  }
  const auto amp = [dt](double lam) { return (1 - 0.5 * dt * lam) / (1 + 0.5 * dt * lam); };
  for (int n = 0; n <= 30; ++n) {
    const Field exact = Field::sample(g, [&](const auto& x) {
      return std::pow(amp(1), n) * std::cos(x[0]) + 0.3 * std::pow(amp(4), n) * std::sin(2 * x[1]);
    });
    for (const auto& r : runs) {
      EXPECT_LE(max_abs_difference(r[n], runs[0][n]), 1e-12);
      EXPECT_LE(max_abs_difference(r[n], exact), 1e-13);
    }
  }
}

TEST(Heat, Bdf2MatchesLinearRecursion) {
  const GridSpec g = grid2(16);
  const Field phi0 = Field::sample(g, [](const auto& x) { return std::cos(x[0]) + 0.3 * std::sin(2 * x[1]); });
  const double dt = 0.1;
  Stepper s(build_model("heat", {}, g), opts(SchemeKind::rzf_bdf2));
  const auto run = run_fields(s, phi0, dt, 30);
  // per-mode: c1 by CN from c0, then 3c_{n+1} - 4c_n + c_{n-1} = -2 dt lam c_{n+1}
  const auto modal = [dt](double lam) {
    std::vector<double> c{1.0, (1 - 0.5 * dt * lam) / (1 + 0.5 * dt * lam)};
    for (int n = 1; n < 30; ++n) c.push_back((4 * c[n] - c[n - 1]) / (3 + 2 * dt * lam));
    return c;
  };
  const auto c1 = modal(1), c4 = modal(4);
  for (int n = 0; n <= 30; ++n) {
    const Field expect =
        Field::sample(g, [&](const auto& x) { return c1[n] * std::cos(x[0]) + 0.3 * c4[n] * std::sin(2 * x[1]); });
    EXPECT_LE(max_abs_difference(run[n], expect), 1e-13) << n;
  }
}

TEST(Heat, ReportsZeroFactorAndDecayingEnergy) {
  const GridSpec g = grid2(16);
  for (auto kind : kAll) {
    Stepper s(model_for(kind, "heat", g), opts(kind));
    const auto traj = integrate(s, noise(g, 4), 0.05, 1.0);
    for (std::size_t i = 1; i < traj.trace.size(); ++i) {
      EXPECT_EQ(traj.trace[i].p_value, 0.0) << to_string(kind);
      EXPECT_LE(traj.trace[i].E_orig, traj.trace[i - 1].E_orig) << to_string(kind);
    }
  }
}

TEST(Sav, HeatKeepsAuxiliaryConstant) {
  const GridSpec g = grid2(8);
  Stepper s(build_model("heat", {}, g), opts(SchemeKind::sav_cn));
  SchemeState st = s.initial_state(noise(g, 8));
  const double r0 = st.r_sav;
  EXPECT_DOUBLE_EQ(r0, 1.0);
  for (int i = 0; i < 10; ++i) s.advance(st, 0.1);
  EXPECT_DOUBLE_EQ(st.r_sav, r0);
}

TEST(Schemes, ChemicalPotentialIdentity) {
  const GridSpec g = grid2(16);
  for (auto name : {"allen_cahn", "cahn_hilliard_beta"}) {
    for (auto kind : {SchemeKind::rzf_cn, SchemeKind::rzf_bdf2}) {
      Stepper s(model_for(kind, name, g), opts(kind));
      SchemeState st = s.initial_state(smooth_noise(g, 6, 0.5));
      const double dt = 0.01;
      for (int i = 0; i < 6; ++i) {
        const TimeScheme ts = st.step == 0 ? TimeScheme::cn : time_scheme(kind);
        const SchemeState before = st;
        SchemeState probe = st;
        if (kind == SchemeKind::rzf_bdf2 && st.step == 0) probe.phi_nm1 = probe.phi_n;
        const Predictor pr = predict(s.context(), probe, dt, ts);
        const StepReport rep = s.advance(st, dt);
        const Field mu = compute_mu(s.model(), s.transform(), st.phi_n, before.phi_n, pr.fprime_hat[0], rep.p_value, ts);
        const Field gmu = apply_multiplier(s.transform(), mu, s.model().mobility);
        Field lhs = st.phi_n;
        if (ts == TimeScheme::cn) {
          lhs.values = (st.phi_n.values - before.phi_n.values) / dt;
        } else {
          lhs.values = (3 * st.phi_n.values - 4 * before.phi_n.values + before.phi_nm1.values) / (2 * dt);
        }
        lhs.values += gmu.values;
        EXPECT_LE(lhs.values.abs().maxCoeff(), 1e-10 * std::max(1.0, gmu.values.abs().maxCoeff()))
            << name << " " << to_string(kind) << " step " << rep.step;
      }
    }
  }
}

TEST(Schemes, MassConservation) {
  const GridSpec g = grid2(16);
  for (auto name : {"cahn_hilliard_beta", "pfc"}) {
    for (auto kind : kAll) {
      if (kind == SchemeKind::rmzf_cn && std::string_view(name) == "pfc") continue;
      Stepper s(model_for(kind, name, g), opts(kind));
      const Field phi0 = name == std::string_view("pfc") ? smooth_noise(g, 2, 0.3) : noise(g, 2, 0.5);
      const auto traj = integrate(s, phi0, 0.01, 1.0);
      EXPECT_LE(std::abs(mean(traj.state.phi_n) - mean(phi0)), 1e-12) << name << " " << to_string(kind);
    }
  }
}

TEST(Schemes, EnergyLawsHoldAndReplay) {
  const GridSpec g = grid2(16);
  for (auto name : {"allen_cahn", "cahn_hilliard_beta"}) {
    for (auto kind : kAll) {
      for (double dt : {0.001, 0.05, 1.0}) {
        Stepper s(model_for(kind, name, g), opts(kind));
        Trajectory traj;
        ASSERT_NO_THROW(traj = integrate(s, noise(g, 31, 0.8), dt, 20 * dt)) << name << " " << to_string(kind);
        EXPECT_TRUE(replay_energy_trace(traj.trace, kind).empty()) << name << " " << to_string(kind) << " " << dt;
        for (const auto& r : traj.trace) {
          EXPECT_GE(r.lambda0, 0.0);
          EXPECT_LE(r.lambda0, 1.0);
          EXPECT_GE(r.kappa, 0.0);
          EXPECT_LE(r.kappa, kind == SchemeKind::rzf_bdf2 ? 2.0 / 3.0 + 1e-15 : 1.0);
        }
      }
    }
  }
}

TEST(Schemes, RelaxedEnergyBoundsAndLambdaZeroDecay) {
  const GridSpec g = grid2(32);
  Stepper s(build_model("allen_cahn", {{"epsilon", 0.4}}, g), opts(SchemeKind::rzf_cn));
  const auto traj = integrate(s, noise(g, 13, 0.9), 0.05, 2.0);
  for (std::size_t i = 1; i < traj.trace.size(); ++i) {
    const auto& r = traj.trace[i];
    EXPECT_LE(r.E_mod, r.E_orig + 1e-10);
    if (r.lambda0 == 0.0) {
      EXPECT_LE(r.E_orig, traj.trace[i - 1].E_orig + 1e-10);
      EXPECT_NEAR(r.E_mod, r.E_orig, 1e-10 * std::max(1.0, std::abs(r.E_orig)));
    }
  }
}

TEST(Schemes, ModifiedEnergyOfConstantState) {
  const GridSpec g = grid2(8);
  const ModelSpec ac = build_model("allen_cahn", {{"epsilon", 0.4}}, g);
  SpectralTransform t(g);
  SchemeState st;
  st.phi_n = Field::constant(g, 0.3);
  st.phi_nm1 = Field::constant(g, 0.3);
  st.R_n = {2.5};
  st.R_nm1 = {4.0};
  EXPECT_NEAR(modified_energy(ac, t, st, SchemeKind::rzf_cn), 2.5, 1e-12);
  EXPECT_NEAR(modified_energy(ac, t, st, SchemeKind::rzf_bdf2), 1.5 * 2.5 - 0.5 * 4.0, 1e-12);
}

TEST(Rmzf, ZeroSecondTermReducesToRzf) {
  const GridSpec g = grid2(16);
  const Field phi0 = noise(g, 21, 0.7);
  Stepper single(build_model("allen_cahn", {{"epsilon", 0.4}}, g), opts(SchemeKind::rzf_cn));
  SchemeOptions o = opts(SchemeKind::rmzf_cn);
  o.factor2 = {FactorKind::proportional, -3.7, 0.0};
  Stepper split(ac_with_zero_term(g), o);
  const auto a = integrate(single, phi0, 0.05, 2.0);
  const auto b = integrate(split, phi0, 0.05, 2.0);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  EXPECT_LE(max_abs_difference(a.state.phi_n, b.state.phi_n), 1e-12);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_NEAR(a.trace[i].E_mod, b.trace[i].E_mod, 1e-12 * std::max(1.0, std::abs(a.trace[i].E_mod)));
    EXPECT_NEAR(a.trace[i].p_value, b.trace[i].p_value, 1e-12);
  }
}

TEST(Rmzf, MatchesWorkedProportionalRateCoefficients) {
  // P = k1 eta, S = k4 eta_t: a, b, c written out in fields
  const GridSpec g = grid2(16);
  const double k1 = 2.0, k4 = 0.5, dt = 0.02;
  SchemeOptions o = opts(SchemeKind::rmzf_cn);
  o.factor = {FactorKind::proportional, k1, 0.0};
  o.factor2 = {FactorKind::rate, k4, 0.0};
  Stepper s(build_model("custom_split", {{"epsilon", 0.4}}, g), o);
  SchemeState st = s.initial_state(noise(g, 40, 0.6));
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const Predictor pr = predict(s.context(), st, dt, TimeScheme::cn);
    const double eta = st.eta_n;
    const double Rn = st.R_sum();
    const auto& g1 = pr.fprime_hat[0];
    const auto& g2 = pr.fprime_hat[1];
    const double w = k4 / dt;
    Field G = g1, H = g1, e = g1, v = g1;
    G.values = k1 * g1.values + w * g2.values;
    H.values = g1.values + (1 - w * eta) * g2.values;
    e.values = k1 * pr.q[0].values + w * pr.q[1].values;
    v.values = pr.phi_bar.values - st.phi_n.values - w * eta * pr.q[1].values;
    const double Rt = f_integral(s.model(), 0, pr.phi_bar) + f_integral(s.model(), 1, pr.phi_bar);
    const double a = inner_product(G, e);
    const double b = inner_product(G, v) + inner_product(H, e);
    const double c = -(Rt - Rn) + inner_product(H, v);
    const StepReport rep = s.advance(st, dt);
    if (rep.branch != "quadratic") continue;
    ++checked;
    const double u = rep.p_value / k1;
    EXPECT_NEAR(rep.s_value, w * (u - eta), 1e-9 * std::max(1.0, std::abs(rep.s_value)));
    EXPECT_LE(std::abs((a * u + b) * u + c), 1e-10 * std::max({std::abs(a), std::abs(b), std::abs(c), 1.0}));
  }
  EXPECT_GT(checked, 10);
}

TEST(Rmzf, SplitCahnHilliardMonotoneWithSmallResidual) {
  const GridSpec g = grid2(32);
  SchemeOptions o = opts(SchemeKind::rmzf_cn);
  Stepper s(build_model("custom_split", {{"epsilon", 0.4}}, g), o);
  const auto traj = integrate(s, noise(g, 50, 0.5), 0.1, 10.0);
  ASSERT_EQ(traj.trace.size(), 101u);
  for (std::size_t i = 1; i < traj.trace.size(); ++i) {
    EXPECT_LE(traj.trace[i].E_mod, traj.trace[i - 1].E_mod + 1e-9 * std::abs(traj.trace[i - 1].E_mod));
    if (traj.trace[i].branch == "quadratic" || traj.trace[i].branch == "linear") {
      EXPECT_LE(traj.trace[i].consistency_residual, 1e-10 * std::max(1.0, std::abs(traj.trace[i].R_tilde)));
    }
  }
}

TEST(ZfCn, NewtonRootMatchesBisectionScan) {
  const GridSpec g = grid2(8);
  const ModelSpec ac = build_model("allen_cahn", {{"epsilon", 0.4}}, g);
  Stepper s(ac, opts(SchemeKind::zf_cn));
  SchemeState st = s.initial_state(noise(g, 60, 0.9));
  int compared = 0;
  for (int i = 0; i < 10; ++i) {
    const double dt = 0.05;
    const auto pp = predictor_pair(s.context(), st, dt, TimeScheme::cn);
    const double Fn = f_integral(ac, 0, st.phi_n);
    const Field phi_n = st.phi_n;
    const auto G = [&](double p) {
      Field phi = pp.phi_bar;
      phi.values += p * pp.q.values;
      Field d = phi;
      d.values -= phi_n.values;
      return f_integral(ac, 0, phi) - Fn - (1 + p) * inner_product(pp.fprime_hat, d);
    };
    const StepReport rep = s.advance(st, dt);
    if (rep.branch != "newton") continue;  // no root at this dt, the step was split
    EXPECT_NEAR(G(rep.p_value), 0.0, 1e-11 * std::max(1.0, std::abs(Fn)));
    // bisect every sign change of G on a uniform scan of [-0.9, 1]
    double nearest = std::numeric_limits<double>::infinity();
    double prev = -0.9, gprev = G(prev);
    for (int k = 1; k <= 2000; ++k) {
      const double p = -0.9 + 1.9 * k / 2000;
      const double gp = G(p);
      if ((gp < 0) != (gprev < 0)) {
        double lo = prev, hi = p;
        const bool neg_lo = gprev < 0;
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((G(mid) < 0) == neg_lo ? lo : hi) = mid;
        }
        nearest = std::min(nearest, std::abs(rep.p_value - 0.5 * (lo + hi)));
      }
      prev = p;
      gprev = gp;
    }
    if (rep.p_value < -0.9 || rep.p_value > 1.0) continue;
    EXPECT_LE(nearest, 1e-9) << "step " << i << " p " << rep.p_value;
    ++compared;
  }
  EXPECT_GE(compared, 5);
}

TEST(ZfCn, OriginalEnergyLawEquality) {
  const GridSpec g = grid2(32);
  Stepper s(build_model("allen_cahn", {{"epsilon", 0.4}}, g), opts(SchemeKind::zf_cn));
  const auto traj = integrate(s, smooth_noise(g, 70, 0.8), 0.01, 0.5);
  for (std::size_t i = 1; i < traj.trace.size(); ++i) {
    const double dE = traj.trace[i].E_orig - traj.trace[i - 1].E_orig;
    EXPECT_LE(std::abs(dE + traj.trace[i].dissipation), 1e-9 * std::max(1.0, std::abs(traj.trace[i - 1].E_orig)));
  }
}

TEST(Schemes, DeterministicReports) {
  const GridSpec g = grid2(16);
  for (auto kind : kAll) {
    const auto run = [&] {
      Stepper s(model_for(kind, "cahn_hilliard_beta", g), opts(kind));
      return integrate(s, noise(g, 90, 0.5), 0.02, 0.4);
    };
    const auto a = run(), b = run();
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      const auto& x = a.trace[i];
      const auto& y = b.trace[i];
      EXPECT_EQ(x.E_mod, y.E_mod);
      EXPECT_EQ(x.E_orig, y.E_orig);
      EXPECT_EQ(x.p_value, y.p_value);
      EXPECT_EQ(x.lambda0, y.lambda0);
      EXPECT_EQ(x.branch, y.branch);
    }
    EXPECT_EQ(max_abs_difference(a.state.phi_n, b.state.phi_n), 0.0);
  }
}

TEST(Schemes, AssertionsCanBeDisabled) {
  const GridSpec g = grid2(8);
  SchemeOptions o = opts(SchemeKind::rzf_cn);
  o.assertions = false;
  Stepper s(build_model("allen_cahn", {{"epsilon", 0.4}}, g), o);
  EXPECT_NO_THROW(integrate(s, noise(g, 1), 0.1, 1.0));
}

TEST(Schemes, RmzfNeedsTwoTerms) {
  const GridSpec g = grid2(8);
  EXPECT_THROW(Stepper(build_model("allen_cahn", {{"epsilon", 0.4}}, g), opts(SchemeKind::rmzf_cn)),
               InvalidArgument);
}

TEST(Integrate, StepCount) {
  EXPECT_EQ(step_count(0.1, 1.0), 10);
  EXPECT_EQ(step_count(0.003125, 1.0), 320);
  EXPECT_THROW(step_count(0.3, 1.0), InvalidArgument);
  EXPECT_THROW(step_count(0.0, 1.0), InvalidArgument);
}
