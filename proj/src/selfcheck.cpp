#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>

#include "gfzf/dense_oracle.hpp"
#include "gfzf/errors.hpp"
#include "gfzf/initial_conditions.hpp"
#include "gfzf/integrate.hpp"
#include "gfzf/relaxation.hpp"
#include "gfzf/runner.hpp"

namespace gfzf {

namespace {

struct Tally {
  std::ostream& out;
  bool all = true;

  void line(const char* name, bool ok, double measured, double tol) {
    out << (ok ? "PASS " : "FAIL ") << name << "  measured=" << measured << " tol=" << tol << "\n";
    all = all && ok;
  }
};

GridSpec square(int n) {
  const std::array<int, 2> dims{n, n};
  const std::array<double, 2> ext{2 * std::numbers::pi, 2 * std::numbers::pi};
  return make_grid(dims, ext);
}

Field noise(const GridSpec& g, std::uint64_t seed, double amp) {
  Field f(g);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = amp * uniform_at(seed, static_cast<std::uint64_t>(i));
  return f;
}

// Root of (1+p)(s0 + m p s1) - drift nearest zero by scan and bisection.
double scan_root(double s0, double s1, double drift, int m) {
  const auto g = [&](double p) { return (1.0 + p) * (s0 + m * p * s1) - drift; };
  double best = std::numeric_limits<double>::quiet_NaN();
  const int n = 20000;
  double prev = -50.0, gprev = g(prev);
  for (int i = 1; i <= n; ++i) {
    const double p = -50.0 + 100.0 * i / n;
    const double gp = g(p);
    if (gprev == 0.0 || gprev * gp < 0.0) {
      double lo = prev, hi = p, glo = gprev;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double r = 0.5 * (lo + hi);
      if (std::isnan(best) || std::abs(r) < std::abs(best)) best = r;
    }
    prev = p;
    gprev = gp;
  }
  return best;
}

}  // namespace

bool selfcheck(std::ostream& out) {
  Tally t{out};
  const GridSpec g8 = square(8);

  {
    const ModelSpec ac = build_model("allen_cahn", {{"epsilon", 0.4}}, g8);
    SchemeOptions opts;
    Stepper stepper(ac, opts);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      SchemeState st = stepper.initial_state(noise(g8, 2 * s, 0.9));
      st.phi_nm1 = noise(g8, 2 * s + 1, 0.9);
      const auto a = predictor_pair(stepper.context(), st, 0.05, TimeScheme::cn);
      const auto b = dense_oracle_step(ac, st, 0.05, TimeScheme::cn);
      worst = std::max({worst, max_abs_difference(a.phi_bar, b.phi_bar), max_abs_difference(a.q, b.q)});
    }
    t.line("dense_oracle_predictor_ac_8x8", worst <= 1e-12, worst, 1e-12);
  }

  {
    double worst = 0.0;
    int compared = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
      const double s0 = 2.0 * uniform_at(11, 3 * i);
      const double s1 = 2.0 * uniform_at(11, 3 * i + 1);
      const double drift = 2.0 * uniform_at(11, 3 * i + 2);
      const AffineFactor f{1.0, 0.0};
      const auto sol = solve_zero_factor(assemble_quadratic(s0, s1, drift, f, 1), f, drift, s0, s1, 1);
      if (sol.branch == Branch::fallback) continue;
      const double ref = scan_root(s0, s1, drift, 1);
      if (std::isnan(ref)) continue;
      worst = std::max(worst, std::abs(ref - sol.p));
      ++compared;
    }
    t.line("zero_factor_vs_scan_bisection", worst <= 1e-9 && compared > 50, worst, 1e-9);
  }

  {
    const auto c1 = choose_relaxation_cn({5, 3, 1});
    const auto c2 = choose_relaxation_cn({3, 5, 4});
    const auto c3 = choose_relaxation_cn({3, 5, 0.5});
    const auto b2 = choose_relaxation_bdf2({3, 5, 6});
    const auto b3 = choose_relaxation_bdf2({3, 5, 1.2});
    const double err = std::abs(c1.lambda0) + std::abs(c1.kappa) + std::abs(c2.lambda0) + std::abs(c2.kappa - 0.5) +
                       std::abs(c3.lambda0 - 0.75) + std::abs(c3.kappa - 1.0) + std::abs(b2.lambda0) +
                       std::abs(b2.kappa - 1.0 / 3.0) + std::abs(b3.lambda0 - 0.6) + std::abs(b3.kappa - 2.0 / 3.0);
    t.line("relaxation_decision_cases", err <= 1e-15, err, 1e-15);
  }

  {
    const GridSpec g = square(16);
    const Field phi0 = Field::sample(g, [](const auto& x) { return std::cos(x[0]) + 0.3 * std::sin(2 * x[1]); });
    const ModelSpec heat = build_model("heat", {{"terms", 2.0}}, g);
    Field ref;
    double worst = 0.0;
    for (auto kind : {SchemeKind::sav_cn, SchemeKind::zf_cn, SchemeKind::rzf_cn, SchemeKind::rmzf_cn}) {
      SchemeOptions opts;
      opts.kind = kind;
      Stepper stepper(heat, opts);
      const Field end = integrate(stepper, phi0, 0.1, 1.0).state.phi_n;
      if (ref.values.size() == 0) {
        ref = end;
      } else {
        worst = std::max(worst, max_abs_difference(end, ref));
      }
    }
    t.line("heat_cn_family_identical", worst <= 1e-12, worst, 1e-12);
  }

  {
    const GridSpec g = square(16);
    const ModelSpec ch = build_model("cahn_hilliard_beta", {{"epsilon", 0.4}}, g);
    SchemeOptions opts;
    Stepper stepper(ch, opts);
    const Field phi0 = noise(g, 5, 0.5);
    const auto traj = integrate(stepper, phi0, 0.01, 0.5);
    const double drift = std::abs(mean(traj.state.phi_n) - mean(phi0));
    t.line("ch_mass_conservation", drift <= 1e-12, drift, 1e-12);
    const auto bad = replay_energy_trace(traj.trace, SchemeKind::rzf_cn);
    t.line("ch_energy_law_replay", bad.empty(), static_cast<double>(bad.size()), 0.0);
  }

  return t.all;
}

}  // namespace gfzf
