#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace gfzf {

/// Periodic tensor grid on [0, L_0) x ... x [0, L_{d-1}), 1 to 3 axes.
///
/// Real fields are stored row-major (last axis fastest). Spectra use the
/// real-transform half layout: dims n_0 x ... x (n_{d-1}/2 + 1), row-major.
/// The integer mode index on a full axis is j for j <= n/2 and j - n above,
/// on the halved last axis it is j. Wavenumbers are k_i = 2*pi*m_i / L_i.
struct GridSpec {
  std::vector<int> dims;
  std::vector<double> extents;
  std::vector<double> spacing;

  [[nodiscard]] int axes() const noexcept { return static_cast<int>(dims.size()); }
  [[nodiscard]] Eigen::Index size() const noexcept;
  [[nodiscard]] Eigen::Index spectral_size() const noexcept;
  [[nodiscard]] std::vector<int> spectral_dims() const;
  /// Product of spacings, the quadrature weight of every node.
  [[nodiscard]] double cell_volume() const noexcept;
  [[nodiscard]] double volume() const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Validates dims (even, >= 4) and extents (> 0) and derives the spacing.
GridSpec make_grid(std::span<const int> dims, std::span<const double> extents);

/// Integer mode indices of the retained spectral entry `index` (unused axes 0).
std::array<int, 3> mode_index(const GridSpec& grid, Eigen::Index index);

/// Wavevector of the retained spectral entry `index` (unused axes 0).
std::array<double, 3> wavevector(const GridSpec& grid, Eigen::Index index);

/// Multi-index of real node `node` (unused axes 0).
std::array<int, 3> node_index(const GridSpec& grid, Eigen::Index node);

/// Flat index of a (periodically wrapped) node multi-index.
Eigen::Index flat_node(const GridSpec& grid, std::array<int, 3> idx);

}  // namespace gfzf
