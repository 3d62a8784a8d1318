#pragma once

#include <array>
#include <memory>
#include <string_view>

#include <Eigen/Core>

#include "gfzf/field.hpp"
#include "gfzf/grid.hpp"

namespace gfzf {

/// Coefficients in the real-transform half layout of a grid (unnormalised
/// forward DFT).
using Spectrum = Eigen::ArrayXcd;

/// Real diagonal operator in the Fourier basis, one symbol per retained mode.
struct FourierMultiplier {
  GridSpec grid;
  Eigen::ArrayXd symbol;

  static FourierMultiplier constant(const GridSpec& g, double value);

  /// Builds the symbol from `fn(k, |k|^2)` evaluated at each retained mode.
  template <class Fn>
  static FourierMultiplier from_wavevector(const GridSpec& g, Fn&& fn) {
    FourierMultiplier m{g, Eigen::ArrayXd(g.spectral_size())};
    for (Eigen::Index i = 0; i < m.symbol.size(); ++i) {
      const auto k = wavevector(g, i);
      m.symbol[i] = fn(k, k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    }
    return m;
  }

  /// min |symbol| > 1e-14 * max(1, max |symbol|).
  [[nodiscard]] bool invertible() const;
  /// Throws SingularOperator naming the offending mode; `what` prefixes the message.
  void require_invertible(std::string_view what) const;
};

FourierMultiplier operator+(const FourierMultiplier& a, const FourierMultiplier& b);
FourierMultiplier operator-(const FourierMultiplier& a, const FourierMultiplier& b);
FourierMultiplier operator*(const FourierMultiplier& a, const FourierMultiplier& b);
FourierMultiplier operator*(double s, const FourierMultiplier& a);

/// Symbol of the Laplacian, -|k|^2.
FourierMultiplier laplacian_symbol(const GridSpec& g);

/// 2/3-rule truncation mask: 1 where every |m_i| < n_i/3, else 0.
FourierMultiplier dealias_mask(const GridSpec& g);

/// Forward/inverse real transforms on one grid. Owns its FFT plans and scratch
/// buffers, so an instance must not be shared between threads; create one per
/// simulation.
class SpectralTransform {
 public:
  explicit SpectralTransform(GridSpec grid);
  ~SpectralTransform();
  SpectralTransform(SpectralTransform&&) noexcept;
  SpectralTransform& operator=(SpectralTransform&&) noexcept;
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  [[nodiscard]] const GridSpec& grid() const noexcept;

  Spectrum forward(const Field& f);
  void forward(const Eigen::ArrayXd& values, Spectrum& out);
  Field inverse(const Spectrum& s);
  void inverse(const Spectrum& s, Eigen::ArrayXd& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// inverse(forward(f)).
Field transform_pair(SpectralTransform& t, const Field& f);

Field apply_multiplier(SpectralTransform& t, const Field& f, const FourierMultiplier& m);

/// Solves apply_multiplier(x, a) = rhs; `a` must be invertible.
Field solve_diagonal(SpectralTransform& t, const Field& rhs, const FourierMultiplier& a);

/// Parseval form of inner_product for two spectra of real fields.
double spectral_inner_product(const GridSpec& g, const Spectrum& a, const Spectrum& b);

/// (m f, f) evaluated from the spectrum of f.
double quadratic_form(const Spectrum& f, const FourierMultiplier& m);

}  // namespace gfzf
