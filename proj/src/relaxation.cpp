#include "gfzf/relaxation.hpp"

#include <algorithm>
#include <cmath>

#include "gfzf/errors.hpp"

namespace gfzf {

namespace {

RelaxationChoice choose(const RelaxationInputs& in, double kappa_max) {
  const double gap = in.R_tilde - in.F_int;
  const double scale = std::max({1.0, std::abs(in.R_tilde), std::abs(in.F_int)});
  if (gap >= 0.0 || std::abs(gap) <= 1e-14 * scale) return {0.0, 0.0};
  const double ratio = std::max(in.dissipation, 0.0) / std::abs(gap);
  if (ratio * kappa_max >= 1.0) return {0.0, 1.0 / ratio};
  return {1.0 - kappa_max * ratio, kappa_max};
}

}  // namespace

RelaxationChoice choose_relaxation_cn(const RelaxationInputs& in) { return choose(in, 1.0); }

RelaxationChoice choose_relaxation_bdf2(const RelaxationInputs& in) { return choose(in, 2.0 / 3.0); }

double relax_R(double lambda0, double R_tilde, double F_int) {
  if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) throw InvalidArgument("lambda0 must lie in [0, 1]");
  return lambda0 * R_tilde + (1.0 - lambda0) * F_int;
}

}  // namespace gfzf
