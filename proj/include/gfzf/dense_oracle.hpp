#pragma once

#include <Eigen/Dense>

#include "gfzf/model.hpp"
#include "gfzf/schemes.hpp"

namespace gfzf {

/// Largest grid (in nodes) the dense oracles accept.
inline constexpr Eigen::Index kDenseOracleMaxNodes = 4096;

/// Real N x N matrix of a Fourier multiplier, assembled as F^{-1} diag(s) F from
/// explicit DFT matrices (Kronecker product of 1D DFTs, full complex layout).
Eigen::MatrixXd dense_operator(const FourierMultiplier& m);

/// Predictor from dense matrices and an LU solve: phi_bar with the summed F',
/// q for the given term.
PredictorPair dense_oracle_step(const ModelSpec& model, const SchemeState& state, double dt, TimeScheme scheme,
                                std::size_t term = 0);

struct DenseSavResult {
  Field phi;
  double r = 0.0;
};

/// SAV-CN step as one coupled (N+1) x (N+1) linear solve in (phi^{n+1}, r^{n+1}).
DenseSavResult dense_sav_step(const ModelSpec& model, const SchemeState& state, double dt);

}  // namespace gfzf
