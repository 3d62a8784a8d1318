#include "gfzf/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gfzf/errors.hpp"

namespace gfzf {

Eigen::Index GridSpec::size() const noexcept {
  Eigen::Index n = 1;
  for (int d : dims) n *= d;
  return n;
}

std::vector<int> GridSpec::spectral_dims() const {
  std::vector<int> s = dims;
  if (!s.empty()) s.back() = s.back() / 2 + 1;
  return s;
}

Eigen::Index GridSpec::spectral_size() const noexcept {
  if (dims.empty()) return 0;
  Eigen::Index n = dims.back() / 2 + 1;
  for (int i = 0; i + 1 < axes(); ++i) n *= dims[i];
  return n;
}

double GridSpec::cell_volume() const noexcept {
  double v = 1.0;
  for (double h : spacing) v *= h;
  return v;
}

double GridSpec::volume() const noexcept {
  double v = 1.0;
  for (double l : extents) v *= l;
  return v;
}

GridSpec make_grid(std::span<const int> dims, std::span<const double> extents) {
  if (dims.empty() || dims.size() > 3) {
    throw InvalidArgument("grid must have 1 to 3 axes, got " + std::to_string(dims.size()));
  }
  if (extents.size() != dims.size()) {
    throw InvalidArgument("grid dims and extents differ in length");
  }
  GridSpec g;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 4 || dims[i] % 2 != 0) {
      throw InvalidArgument("grid dim " + std::to_string(i) + " must be even and >= 4, got " +
                            std::to_string(dims[i]));
    }
    if (!(extents[i] > 0.0) || !std::isfinite(extents[i])) {
      throw InvalidArgument("grid extent " + std::to_string(i) + " must be positive");
    }
    g.dims.push_back(dims[i]);
    g.extents.push_back(extents[i]);
    g.spacing.push_back(extents[i] / dims[i]);
  }
  return g;
}

std::array<int, 3> mode_index(const GridSpec& grid, Eigen::Index index) {
  const auto sdims = grid.spectral_dims();
  std::array<int, 3> m{0, 0, 0};
  for (int axis = grid.axes() - 1; axis >= 0; --axis) {
    const int j = static_cast<int>(index % sdims[axis]);
    index /= sdims[axis];
    const int n = grid.dims[axis];
    m[axis] = (axis == grid.axes() - 1 || j <= n / 2) ? j : j - n;
  }
  return m;
}

std::array<double, 3> wavevector(const GridSpec& grid, Eigen::Index index) {
  const auto m = mode_index(grid, index);
  std::array<double, 3> k{0.0, 0.0, 0.0};
  for (int axis = 0; axis < grid.axes(); ++axis) {
    k[axis] = 2.0 * std::numbers::pi * m[axis] / grid.extents[axis];
  }
  return k;
}

std::array<int, 3> node_index(const GridSpec& grid, Eigen::Index node) {
  std::array<int, 3> idx{0, 0, 0};
  for (int axis = grid.axes() - 1; axis >= 0; --axis) {
    idx[axis] = static_cast<int>(node % grid.dims[axis]);
    node /= grid.dims[axis];
  }
  return idx;
}

Eigen::Index flat_node(const GridSpec& grid, std::array<int, 3> idx) {
  Eigen::Index flat = 0;
  for (int axis = 0; axis < grid.axes(); ++axis) {
    const int n = grid.dims[axis];
    flat = flat * n + ((idx[axis] % n) + n) % n;
  }
  return flat;
}

}  // namespace gfzf
