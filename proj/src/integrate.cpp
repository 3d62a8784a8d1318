#include "gfzf/integrate.hpp"

#include <cmath>
#include <sstream>

#include "gfzf/errors.hpp"

namespace gfzf {

long step_count(double dt, double T) {
  if (!(dt > 0.0) || !(T > 0.0)) throw InvalidArgument("dt and T must be positive");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) {
    std::ostringstream msg;
    msg << "T = " << T << " is not a whole number of steps of dt = " << dt;
    throw InvalidArgument(msg.str());
  }
  return static_cast<long>(n);
}

Trajectory integrate(Stepper& stepper, const Field& phi0, double dt, double T, const StepObserver& observe) {
  const long steps = step_count(dt, T);
  Trajectory out;
  out.state = stepper.initial_state(phi0);
  out.trace.reserve(static_cast<std::size_t>(steps) + 1);
  out.trace.push_back(stepper.initial_report(out.state));
  if (observe) observe(out.trace.back(), out.state);
  for (long n = 1; n <= steps; ++n) {
    StepReport rep = stepper.advance(out.state, dt);
    out.state.t = static_cast<double>(n) * dt;
    rep.t = out.state.t;
    if (!out.state.phi_n.all_finite()) {
      throw AssertionFailure("solution became non-finite at step " + std::to_string(n));
    }
    out.trace.push_back(std::move(rep));
    if (observe) observe(out.trace.back(), out.state);
  }
  return out;
}

}  // namespace gfzf
