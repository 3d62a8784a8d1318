#include "gfzf/dense_oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <unsupported/Eigen/KroneckerProduct>

#include "gfzf/errors.hpp"

namespace gfzf {

namespace {

Eigen::MatrixXcd dft_matrix(int n) {
  Eigen::MatrixXcd f(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) f(k, j) = std::polar(1.0, -2.0 * std::numbers::pi * k * j / n);
  }
  return f;
}

// Symbol value at a full-layout frequency multi-index, read from the half
// layout through conjugate symmetry.
double full_symbol(const FourierMultiplier& m, std::vector<int> k) {
  const auto& dims = m.grid.dims;
  const int last = static_cast<int>(dims.size()) - 1;
  if (k[last] > dims[last] / 2) {
    for (std::size_t a = 0; a < dims.size(); ++a) k[a] = (dims[a] - k[a]) % dims[a];
  }
  Eigen::Index idx = 0;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    const int extent = static_cast<int>(a) == last ? dims[a] / 2 + 1 : dims[a];
    idx = idx * extent + k[a];
  }
  return m.symbol[idx];
}

void require_small(const GridSpec& g) {
  if (g.size() > kDenseOracleMaxNodes) {
    throw InvalidArgument("dense oracle accepts at most " + std::to_string(kDenseOracleMaxNodes) + " nodes");
  }
}

Eigen::VectorXd vec(const Field& f) { return f.values.matrix(); }

Field field(const GridSpec& g, const Eigen::VectorXd& v) { return Field(g, v.array()); }

}  // namespace

Eigen::MatrixXd dense_operator(const FourierMultiplier& m) {
  const GridSpec& g = m.grid;
  require_small(g);
  Eigen::MatrixXcd F = dft_matrix(g.dims[0]);
  for (int a = 1; a < g.axes(); ++a) {
    Eigen::MatrixXcd next = Eigen::kroneckerProduct(F, dft_matrix(g.dims[a])).eval();
    F = std::move(next);
  }
  const Eigen::Index n = g.size();
  Eigen::VectorXcd s(n);
  std::vector<int> k(g.dims.size(), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index rest = i;
    for (int a = g.axes() - 1; a >= 0; --a) {
      k[a] = static_cast<int>(rest % g.dims[a]);
      rest /= g.dims[a];
    }
    s[i] = full_symbol(m, k);
  }
  const Eigen::MatrixXcd M = F.adjoint() * s.asDiagonal() * F / static_cast<double>(n);
  return M.real();
}

PredictorPair dense_oracle_step(const ModelSpec& model, const SchemeState& state, double dt, TimeScheme scheme,
                                std::size_t term) {
  const GridSpec& g = model.grid();
  require_small(g);
  if (term >= model.terms.size()) throw InvalidArgument("nonlinear term index out of range");
  const bool cn = scheme == TimeScheme::cn;
  const Eigen::Index n = g.size();
  const Eigen::MatrixXd L = dense_operator(model.linear);
  const Eigen::MatrixXd G = dense_operator(model.mobility);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd GL = G * L;

  const Eigen::VectorXd pn = vec(state.phi_n);
  const Eigen::VectorXd pnm1 = vec(state.phi_nm1);
  const Field phi_hat(g, cn ? (1.5 * pn - 0.5 * pnm1).array().eval() : (2.0 * pn - pnm1).array().eval());
  Eigen::VectorXd gsum = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < model.terms.size(); ++j) gsum += vec(f_prime(model, j, phi_hat));
  const Eigen::VectorXd gterm = vec(f_prime(model, term, phi_hat));

  const Eigen::MatrixXd A = cn ? (I + 0.5 * dt * GL).eval() : (3.0 * I + 2.0 * dt * GL).eval();
  const double scale = cn ? -dt : -2.0 * dt;
  const Eigen::VectorXd lin = cn ? ((I - 0.5 * dt * GL) * pn).eval() : (4.0 * pn - pnm1).eval();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd phi_bar = lu.solve(lin + scale * (G * gsum));
  const Eigen::VectorXd q = lu.solve(scale * (G * gterm));
  return {field(g, phi_bar), field(g, q), field(g, gterm)};
}

DenseSavResult dense_sav_step(const ModelSpec& model, const SchemeState& state, double dt) {
  const GridSpec& g = model.grid();
  require_small(g);
  const Eigen::Index n = g.size();
  const Eigen::MatrixXd L = dense_operator(model.linear);
  const Eigen::MatrixXd G = dense_operator(model.mobility);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  const Eigen::VectorXd pn = vec(state.phi_n);
  const Eigen::VectorXd pnm1 = vec(state.phi_nm1);
  const Field phi_hat(g, (1.5 * pn - 0.5 * pnm1).array().eval());
  Eigen::VectorXd gv = Eigen::VectorXd::Zero(n);
  double e1 = model.param("C_sav");
  for (std::size_t j = 0; j < model.terms.size(); ++j) {
    gv += vec(f_prime(model, j, phi_hat));
    e1 += g.cell_volume() * model.terms[j].density(phi_hat.values).sum();
  }
  const double w = std::sqrt(e1);
  const Eigen::VectorXd h = g.cell_volume() * gv;  // (g, v) = h^T v

  // [I + dt/2 GL,   dt/(2w) G g] [phi]   [(I - dt/2 GL) phi^n - dt/(2w) G g r^n]
  // [-h^T/(2w),     1          ] [r  ] = [r^n - h^T phi^n / (2w)               ]
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + 1, n + 1);
  K.topLeftCorner(n, n) = I + 0.5 * dt * G * L;
  K.topRightCorner(n, 1) = dt / (2.0 * w) * (G * gv);
  K.bottomLeftCorner(1, n) = -h.transpose() / (2.0 * w);
  K(n, n) = 1.0;
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = (I - 0.5 * dt * G * L) * pn - dt / (2.0 * w) * (G * gv) * state.r_sav;
  rhs(n) = state.r_sav - h.dot(pn) / (2.0 * w);
  const Eigen::VectorXd x = K.partialPivLu().solve(rhs);
  return {field(g, x.head(n)), x(n)};
}

}  // namespace gfzf
