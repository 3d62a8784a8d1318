#pragma once

#include <array>

#include <Eigen/Core>

#include "gfzf/grid.hpp"

namespace gfzf {

/// Real samples of a scalar field on a periodic grid, row-major.
struct Field {
  GridSpec grid;
  Eigen::ArrayXd values;

  Field() = default;
  /// Zero field on `g`.
  explicit Field(GridSpec g);
  Field(GridSpec g, Eigen::ArrayXd v);

  static Field constant(const GridSpec& g, double value);

  /// Samples `fn(x)` at node positions x_i = origin_i + j_i * h_i.
  template <class Fn>
  static Field sample(const GridSpec& g, Fn&& fn, std::array<double, 3> origin = {0.0, 0.0, 0.0}) {
    Field f(g);
    for (Eigen::Index n = 0; n < f.values.size(); ++n) {
      const auto idx = node_index(g, n);
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (int axis = 0; axis < g.axes(); ++axis) {
        x[axis] = origin[axis] + idx[axis] * g.spacing[axis];
      }
      f.values[n] = fn(x);
    }
    return f;
  }

  [[nodiscard]] bool all_finite() const { return values.allFinite(); }
};

void require_same_grid(const Field& a, const Field& b);

/// Periodic trapezoid approximation of the integral of f*g over the domain.
double inner_product(const Field& f, const Field& g);

/// Integral of f over the domain.
double integral(const Field& f);

double mean(const Field& f);

double max_abs_difference(const Field& a, const Field& b);

}  // namespace gfzf
