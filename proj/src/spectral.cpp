#include "gfzf/spectral.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "gfzf/errors.hpp"

namespace gfzf {

namespace {

// The FFTW planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw GridMismatch();
}

// Sum of a half-layout quantity over the full spectrum: entries on the first
// and Nyquist columns of the halved axis appear once, the rest twice.
double parseval_sum(const GridSpec& g, const Eigen::ArrayXd& half) {
  const int nlast = g.dims.back();
  const Eigen::Index cols = nlast / 2 + 1;
  const Eigen::Index rows = half.size() / cols;
  Eigen::Map<const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      half.data(), rows, cols);
  return 2.0 * m.sum() - m.col(0).sum() - m.col(nlast / 2).sum();
}

}  // namespace

// ---------------------------------------------------------------- multipliers

FourierMultiplier FourierMultiplier::constant(const GridSpec& g, double value) {
  return {g, Eigen::ArrayXd::Constant(g.spectral_size(), value)};
}

bool FourierMultiplier::invertible() const {
  if (symbol.size() == 0) return false;
  const double scale = std::max(1.0, symbol.abs().maxCoeff());
  return symbol.abs().minCoeff() > 1e-14 * scale;
}

void FourierMultiplier::require_invertible(std::string_view what) const {
  if (invertible()) return;
  Eigen::Index worst = 0;
  symbol.abs().minCoeff(&worst);
  const auto m = mode_index(grid, worst);
  throw SingularOperator(std::string(what) + ": symbol " + std::to_string(symbol[worst]) +
                             " at mode (" + std::to_string(m[0]) + "," + std::to_string(m[1]) +
                             "," + std::to_string(m[2]) + ") is not invertible",
                         static_cast<long>(worst), symbol[worst]);
}

FourierMultiplier operator+(const FourierMultiplier& a, const FourierMultiplier& b) {
  require_same_grid(a.grid, b.grid);
  return {a.grid, a.symbol + b.symbol};
}

FourierMultiplier operator-(const FourierMultiplier& a, const FourierMultiplier& b) {
  require_same_grid(a.grid, b.grid);
  return {a.grid, a.symbol - b.symbol};
}

FourierMultiplier operator*(const FourierMultiplier& a, const FourierMultiplier& b) {
  require_same_grid(a.grid, b.grid);
  return {a.grid, a.symbol * b.symbol};
}

FourierMultiplier operator*(double s, const FourierMultiplier& a) { return {a.grid, s * a.symbol}; }

FourierMultiplier laplacian_symbol(const GridSpec& g) {
  return FourierMultiplier::from_wavevector(g, [](const auto&, double k2) { return -k2; });
}

FourierMultiplier dealias_mask(const GridSpec& g) {
  FourierMultiplier m{g, Eigen::ArrayXd(g.spectral_size())};
  for (Eigen::Index i = 0; i < m.symbol.size(); ++i) {
    const auto mode = mode_index(g, i);
    bool keep = true;
    for (int axis = 0; axis < g.axes(); ++axis) {
      keep = keep && 3 * std::abs(mode[axis]) < g.dims[axis];
    }
    m.symbol[i] = keep ? 1.0 : 0.0;
  }
  return m;
}

// ----------------------------------------------------------------- transform

struct SpectralTransform::Impl {
  GridSpec grid;
  double* real_buf = nullptr;
  fftw_complex* spec_buf = nullptr;
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;

  explicit Impl(GridSpec g) : grid(std::move(g)) {
    const auto n = grid.size();
    const auto ns = grid.spectral_size();
    std::lock_guard lock(planner_mutex());
    real_buf = fftw_alloc_real(static_cast<size_t>(n));
    spec_buf = fftw_alloc_complex(static_cast<size_t>(ns));
    // ESTIMATE keeps plan selection (and hence round-off) deterministic.
    forward_plan = fftw_plan_dft_r2c(grid.axes(), grid.dims.data(), real_buf, spec_buf,
                                     FFTW_ESTIMATE);
    inverse_plan = fftw_plan_dft_c2r(grid.axes(), grid.dims.data(), spec_buf, real_buf,
                                     FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_plan);
    fftw_destroy_plan(inverse_plan);
    fftw_free(real_buf);
    fftw_free(spec_buf);
  }
};

SpectralTransform::SpectralTransform(GridSpec grid) : impl_(std::make_unique<Impl>(std::move(grid))) {}
SpectralTransform::~SpectralTransform() = default;
SpectralTransform::SpectralTransform(SpectralTransform&&) noexcept = default;
SpectralTransform& SpectralTransform::operator=(SpectralTransform&&) noexcept = default;

const GridSpec& SpectralTransform::grid() const noexcept { return impl_->grid; }

void SpectralTransform::forward(const Eigen::ArrayXd& values, Spectrum& out) {
  const auto n = impl_->grid.size();
  if (values.size() != n) throw GridMismatch();
  std::copy(values.data(), values.data() + n, impl_->real_buf);
  fftw_execute(impl_->forward_plan);
  const auto ns = impl_->grid.spectral_size();
  out.resize(ns);
  const auto* src = reinterpret_cast<const std::complex<double>*>(impl_->spec_buf);
  std::copy(src, src + ns, out.data());
}

Spectrum SpectralTransform::forward(const Field& f) {
  require_same_grid(f.grid, impl_->grid);
  Spectrum out;
  forward(f.values, out);
  return out;
}

void SpectralTransform::inverse(const Spectrum& s, Eigen::ArrayXd& out) {
  const auto ns = impl_->grid.spectral_size();
  if (s.size() != ns) throw GridMismatch();
  auto* dst = reinterpret_cast<std::complex<double>*>(impl_->spec_buf);
  std::copy(s.data(), s.data() + ns, dst);
  fftw_execute(impl_->inverse_plan);
  const auto n = impl_->grid.size();
  out = Eigen::Map<const Eigen::ArrayXd>(impl_->real_buf, n) / static_cast<double>(n);
}

Field SpectralTransform::inverse(const Spectrum& s) {
  Field f(impl_->grid);
  inverse(s, f.values);
  return f;
}

Field transform_pair(SpectralTransform& t, const Field& f) { return t.inverse(t.forward(f)); }

Field apply_multiplier(SpectralTransform& t, const Field& f, const FourierMultiplier& m) {
  require_same_grid(f.grid, m.grid);
  Spectrum s = t.forward(f);
  s *= m.symbol;
  return t.inverse(s);
}

Field solve_diagonal(SpectralTransform& t, const Field& rhs, const FourierMultiplier& a) {
  require_same_grid(rhs.grid, a.grid);
  a.require_invertible("solve_diagonal");
  Spectrum s = t.forward(rhs);
  s /= a.symbol;
  return t.inverse(s);
}

double spectral_inner_product(const GridSpec& g, const Spectrum& a, const Spectrum& b) {
  const Eigen::ArrayXd prod = a.real() * b.real() + a.imag() * b.imag();
  return g.cell_volume() * parseval_sum(g, prod) / static_cast<double>(g.size());
}

double quadratic_form(const Spectrum& f, const FourierMultiplier& m) {
  const GridSpec& g = m.grid;
  const Eigen::ArrayXd prod = m.symbol * f.abs2();
  return g.cell_volume() * parseval_sum(g, prod) / static_cast<double>(g.size());
}

}  // namespace gfzf
