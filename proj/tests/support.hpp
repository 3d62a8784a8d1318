#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "gfzf/field.hpp"
#include "gfzf/grid.hpp"
#include "gfzf/initial_conditions.hpp"

namespace gfzf::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline GridSpec grid1(int n, double L = kTwoPi) {
  const std::array<int, 1> d{n};
  const std::array<double, 1> e{L};
  return make_grid(d, e);
}

inline GridSpec grid2(int n, double L = kTwoPi) {
  const std::array<int, 2> d{n, n};
  const std::array<double, 2> e{L, L};
  return make_grid(d, e);
}

inline GridSpec grid3(int n, double L = kTwoPi) {
  const std::array<int, 3> d{n, n, n};
  const std::array<double, 3> e{L, L, L};
  return make_grid(d, e);
}

/// amp * uniform[-1, 1) per node from the seeded stream.
inline Field noise(const GridSpec& g, std::uint64_t seed, double amp = 1.0) {
  Field f(g);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = amp * uniform_at(seed, static_cast<std::uint64_t>(i));
  return f;
}

/// Smooth random field: a few low modes with seeded amplitudes.
inline Field smooth_noise(const GridSpec& g, std::uint64_t seed, double amp = 1.0) {
  double c[6];
  for (int i = 0; i < 6; ++i) c[i] = amp * uniform_at(seed, static_cast<std::uint64_t>(i));
  return Field::sample(g, [&](const auto& x) {
    return c[0] * std::cos(x[0]) + c[1] * std::sin(x[1] + 0.3) + c[2] * std::cos(2 * x[0] - x[1]) +
           c[3] * std::sin(x[0] + x[1]) + c[4] * std::cos(3 * x[1]) + c[5] * 0.5;
  });
}

}  // namespace gfzf::testing
