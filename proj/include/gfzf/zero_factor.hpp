#pragma once

#include <string>
#include <string_view>

namespace gfzf {

enum class FactorKind { proportional, rate };
enum class TimeScheme { cn, bdf2 };

/// P(eta) = k*eta (proportional, eta(0) = 0) or k*eta_t (rate, eta(0) arbitrary).
struct FactorSpec {
  FactorKind kind = FactorKind::rate;
  double k = 1.0;
  double eta_init = 0.0;

  /// Throws InvalidArgument on k == 0 or a proportional factor with eta_init != 0.
  void validate() const;
};

FactorKind parse_factor_kind(std::string_view name);
std::string_view to_string(FactorKind kind);

/// Factor value p = slope*u + offset in the step's scalar unknown u.
struct AffineFactor {
  double slope = 1.0;
  double offset = 0.0;

  [[nodiscard]] double value(double u) const noexcept { return slope * u + offset; }
  [[nodiscard]] double unknown(double p) const noexcept { return (p - offset) / slope; }
};

/// a*u^2 + b*u + c = 0.
struct QuadraticCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  [[nodiscard]] double operator()(double u) const noexcept { return (a * u + b) * u + c; }
};

/// Affine form of the discretised factor.
///
///   proportional, cn    p = k u                                u = eta^{n+1/2}
///   rate, cn            p = (k/dt) u - (k/dt) eta^n            u = eta^{n+1}
///   proportional, bdf2  p = k u                                u = eta^{n+1}
///   rate, bdf2          p = 3k/(2dt) u - k(4eta^n - eta^{n-1})/(2dt)
AffineFactor affine_factor_form(const FactorSpec& spec, TimeScheme scheme, double dt, double eta_n,
                                double eta_nm1);

/// Expands drift = (1+p)(s0 + m p s1), p = slope*u + offset, into u-coefficients.
/// m is 1 for cn and 3 for bdf2.
QuadraticCoeffs assemble_quadratic(double s0, double s1, double drift, const AffineFactor& factor,
                                   int multiplicity);

enum class Branch { quadratic, linear, fallback };
enum class FallbackReason { none, small_drift, negative_discriminant, near_minus_one, degenerate, residual };

std::string_view to_string(Branch b);
std::string_view to_string(FallbackReason r);

struct ZeroFactorSolution {
  double u = 0.0;
  double p = 0.0;
  Branch branch = Branch::fallback;
  FallbackReason reason = FallbackReason::none;
};

/// |drift - (1+p)(s0 + m p s1)|.
double consistency_residual(double p, double drift, double s0, double s1, int multiplicity);

/// Solves the consistency equation for the root of smallest |p|.
///
/// The root is computed from the equivalent polynomial in p, which avoids the
/// cancellation of slope*u + offset for large rate slopes; `q` must be the
/// assemble_quadratic output for the same scalars and is used for the
/// residual check in u. Falls back to p = 0 on |drift| < 1e-15, |p + 1| < 0.5,
/// or a failed residual check. With a negative discriminant there is no real
/// root and p is the vertex of the parabola, where the residual is smallest.
ZeroFactorSolution solve_zero_factor(const QuadraticCoeffs& q, const AffineFactor& factor, double drift,
                                     double s0, double s1, int multiplicity);

/// Pairings for two nonlinear terms: d_i = (g_i, phi_bar - phi^n), a_ij = (g_i, q_j)
/// with g_i = F_i'(phi_hat).
struct TwoTermScalars {
  double d1 = 0.0;
  double d2 = 0.0;
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;
  bool active1 = true;  // F_1' not identically zero
  bool active2 = true;
};

/// Right-hand side (1+p)(d1 + p a11 + s a12) + (1+s)(d2 + p a21 + s a22).
double two_factor_rhs(const TwoTermScalars& sc, double p, double s);

/// Coefficients in u of two_factor_rhs(p(u), s(u)) - drift.
QuadraticCoeffs assemble_two_factor(const TwoTermScalars& sc, const AffineFactor& f1,
                                    const AffineFactor& f2, double drift);

struct TwoFactorSolution {
  double u = 0.0;
  double p = 0.0;
  double s = 0.0;
  Branch branch = Branch::fallback;
  FallbackReason reason = FallbackReason::none;
};

/// Shared-unknown solve for two factors. Among real roots picks the one
/// minimising the sum of squared active factor values. Fallback sets p = s = 0
/// and u to the current eta (`u_keep`), except for a negative discriminant,
/// where u is the vertex of the quadratic.
TwoFactorSolution solve_two_factor(const TwoTermScalars& sc, const AffineFactor& f1,
                                   const AffineFactor& f2, double drift, double u_keep);

}  // namespace gfzf
