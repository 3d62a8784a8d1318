#pragma once

#include <functional>
#include <vector>

#include "gfzf/field.hpp"
#include "gfzf/schemes.hpp"

namespace gfzf {

struct Trajectory {
  std::vector<StepReport> trace;  // row 0 is the initial level
  SchemeState state;
};

using StepObserver = std::function<void(const StepReport&, const SchemeState&)>;

/// Number of steps of size dt covering [0, T]; throws unless T/dt is an integer
/// to within 1e-9 relative.
long step_count(double dt, double T);

/// Runs a stepper from phi0 to T. The observer sees the initial level and every
/// accepted step. Times are set to k*dt to avoid accumulated rounding.
Trajectory integrate(Stepper& stepper, const Field& phi0, double dt, double T, const StepObserver& observe = {});

}  // namespace gfzf
