#pragma once

namespace gfzf {

struct RelaxationInputs {
  double R_tilde = 0.0;
  double F_int = 0.0;
  /// dt (G mu, mu), plus (L d2, d2)/4 for BDF2.
  double dissipation = 0.0;
};

struct RelaxationChoice {
  double lambda0 = 0.0;
  double kappa = 0.0;
};

/// Smallest lambda0 in [0, 1] with kappa in [0, 1] such that
/// relax_R(lambda0) - R_tilde <= kappa * dissipation.
RelaxationChoice choose_relaxation_cn(const RelaxationInputs& in);

/// As choose_relaxation_cn with kappa in [0, 2/3].
RelaxationChoice choose_relaxation_bdf2(const RelaxationInputs& in);

/// lambda0 * R_tilde + (1 - lambda0) * F_int.
double relax_R(double lambda0, double R_tilde, double F_int);

}  // namespace gfzf
