#include "gfzf/zero_factor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gfzf/errors.hpp"

namespace gfzf {

namespace {

constexpr double kDriftFloor = 1e-15;
constexpr double kLinearTol = 1e-14;
constexpr double kMinusOneBand = 0.5;
constexpr double kResidualTol = 1e-10;

struct Roots {
  int count = 0;  // 0: none, 1: linear root, 2: quadratic roots
  double r1 = 0.0;
  double r2 = 0.0;
  bool negative_discriminant = false;
};

Roots real_roots(double a, double b, double c) {
  Roots out;
  if (std::abs(a) <= kLinearTol * std::max({std::abs(b), std::abs(c), 1.0})) {
    if (b == 0.0) return out;
    out.count = 1;
    out.r1 = -c / b;
    return out;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    out.negative_discriminant = true;
    return out;
  }
  const double t = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  out.count = 2;
  if (t == 0.0) {
    out.r1 = out.r2 = 0.0;
  } else {
    out.r1 = t / a;
    out.r2 = c / t;
  }
  return out;
}

}  // namespace

void FactorSpec::validate() const {
  if (k == 0.0 || !std::isfinite(k)) throw InvalidArgument("zero factor constant k must be nonzero");
  if (kind == FactorKind::proportional && eta_init != 0.0) {
    throw InvalidArgument("a proportional zero factor needs eta_init = 0");
  }
}

FactorKind parse_factor_kind(std::string_view name) {
  if (name == "proportional") return FactorKind::proportional;
  if (name == "rate") return FactorKind::rate;
  throw InvalidArgument("unknown factor kind '" + std::string(name) + "'");
}

std::string_view to_string(FactorKind kind) {
  return kind == FactorKind::proportional ? "proportional" : "rate";
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::quadratic: return "quadratic";
    case Branch::linear: return "linear";
    case Branch::fallback: return "fallback";
  }
  return "fallback";
}

std::string_view to_string(FallbackReason r) {
  switch (r) {
    case FallbackReason::none: return "none";
    case FallbackReason::small_drift: return "small_drift";
    case FallbackReason::negative_discriminant: return "negative_discriminant";
    case FallbackReason::near_minus_one: return "near_minus_one";
    case FallbackReason::degenerate: return "degenerate";
    case FallbackReason::residual: return "residual";
  }
  return "none";
}

AffineFactor affine_factor_form(const FactorSpec& spec, TimeScheme scheme, double dt, double eta_n,
                                double eta_nm1) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const double k = spec.k;
  if (spec.kind == FactorKind::proportional) return {k, 0.0};
  if (scheme == TimeScheme::cn) return {k / dt, -(k / dt) * eta_n};
  return {1.5 * k / dt, -k * (4.0 * eta_n - eta_nm1) / (2.0 * dt)};
}

QuadraticCoeffs assemble_quadratic(double s0, double s1, double drift, const AffineFactor& factor,
                                   int multiplicity) {
  const double m = multiplicity;
  const double sl = factor.slope;
  const double off = factor.offset;
  return {m * s1 * sl * sl, sl * (s0 + m * s1 * (1.0 + 2.0 * off)),
          (1.0 + off) * (s0 + m * off * s1) - drift};
}

double consistency_residual(double p, double drift, double s0, double s1, int multiplicity) {
  return std::abs(drift - (1.0 + p) * (s0 + multiplicity * p * s1));
}

ZeroFactorSolution solve_zero_factor(const QuadraticCoeffs& q, const AffineFactor& factor, double drift,
                                     double s0, double s1, int multiplicity) {
  const auto fallback = [&](FallbackReason why) {
    return ZeroFactorSolution{factor.unknown(0.0), 0.0, Branch::fallback, why};
  };
  if (std::abs(drift) < kDriftFloor) return fallback(FallbackReason::small_drift);

  const double m = multiplicity;
  const Roots r = real_roots(m * s1, s0 + m * s1, s0 - drift);
  if (r.negative_discriminant) {
    // No real root: take the p with the smallest consistency residual.
    const double pv = -(s0 + m * s1) / (2.0 * m * s1);
    return ZeroFactorSolution{factor.unknown(pv), pv, Branch::fallback, FallbackReason::negative_discriminant};
  }
  if (r.count == 0) return fallback(FallbackReason::degenerate);

  double p = r.r1;
  if (r.count == 2 && std::abs(r.r2) < std::abs(r.r1)) p = r.r2;
  if (std::abs(p + 1.0) < kMinusOneBand) return fallback(FallbackReason::near_minus_one);

  const double u = factor.unknown(p);
  const double res_p = consistency_residual(p, drift, s0, s1, multiplicity);
  const double scale_u =
      std::max({std::abs(q.a), std::abs(q.b), std::abs(q.c), std::abs(q.a) * u * u, std::abs(q.b * u), 1.0});
  if (res_p > kResidualTol * std::max(1.0, std::abs(drift)) || std::abs(q(u)) > kResidualTol * scale_u) {
    return fallback(FallbackReason::residual);
  }
  return {u, p, r.count == 2 ? Branch::quadratic : Branch::linear, FallbackReason::none};
}

double two_factor_rhs(const TwoTermScalars& sc, double p, double s) {
  return (1.0 + p) * (sc.d1 + p * sc.a11 + s * sc.a12) + (1.0 + s) * (sc.d2 + p * sc.a21 + s * sc.a22);
}

QuadraticCoeffs assemble_two_factor(const TwoTermScalars& sc, const AffineFactor& f1,
                                    const AffineFactor& f2, double drift) {
  const double al1 = f1.slope, pi1 = f1.offset;
  const double al2 = f2.slope, pi2 = f2.offset;
  const double c1 = sc.d1 + pi1 * sc.a11 + pi2 * sc.a12;
  const double e1 = al1 * sc.a11 + al2 * sc.a12;
  const double c2 = sc.d2 + pi1 * sc.a21 + pi2 * sc.a22;
  const double e2 = al1 * sc.a21 + al2 * sc.a22;
  return {al1 * e1 + al2 * e2, (1.0 + pi1) * e1 + al1 * c1 + (1.0 + pi2) * e2 + al2 * c2,
          (1.0 + pi1) * c1 + (1.0 + pi2) * c2 - drift};
}

TwoFactorSolution solve_two_factor(const TwoTermScalars& sc, const AffineFactor& f1,
                                   const AffineFactor& f2, double drift, double u_keep) {
  const auto fallback = [&](FallbackReason why) {
    return TwoFactorSolution{u_keep, 0.0, 0.0, Branch::fallback, why};
  };
  if (std::abs(drift) < kDriftFloor) return fallback(FallbackReason::small_drift);
  if (!sc.active1 && !sc.active2) return fallback(FallbackReason::degenerate);

  // Work in v = u - u0 where u0 zeroes the first active factor, so that factor
  // values are formed without cancellation.
  const AffineFactor& lead = sc.active1 ? f1 : f2;
  const double u0 = lead.unknown(0.0);
  const AffineFactor g1{f1.slope, f1.value(u0)};
  const AffineFactor g2{f2.slope, f2.value(u0)};
  const QuadraticCoeffs q = assemble_two_factor(sc, g1, g2, drift);

  const Roots r = real_roots(q.a, q.b, q.c);
  if (r.negative_discriminant) {
    const double v = -q.b / (2.0 * q.a);
    return {u0 + v, g1.value(v), g2.value(v), Branch::fallback, FallbackReason::negative_discriminant};
  }
  if (r.count == 0) return fallback(FallbackReason::degenerate);

  const auto cost = [&](double v) {
    const double p = g1.value(v), s = g2.value(v);
    return (sc.active1 ? p * p : 0.0) + (sc.active2 ? s * s : 0.0);
  };
  double v = r.r1;
  if (r.count == 2 && cost(r.r2) < cost(r.r1)) v = r.r2;
  const double p = g1.value(v);
  const double s = g2.value(v);
  if ((sc.active1 && std::abs(p + 1.0) < kMinusOneBand) || (sc.active2 && std::abs(s + 1.0) < kMinusOneBand)) {
    return fallback(FallbackReason::near_minus_one);
  }
  if (std::abs(drift - two_factor_rhs(sc, p, s)) > kResidualTol * std::max(1.0, std::abs(drift))) {
    return fallback(FallbackReason::residual);
  }
  return {u0 + v, p, s, r.count == 2 ? Branch::quadratic : Branch::linear, FallbackReason::none};
}

}  // namespace gfzf
