#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gfzf/field.hpp"
#include "gfzf/spectral.hpp"

namespace gfzf {

using ParamMap = std::map<std::string, double, std::less<>>;

/// Pointwise nonlinear density F and its derivative F', applied to whole sample arrays.
struct NonlinearTerm {
  using Map = std::function<Eigen::ArrayXd(const Eigen::ArrayXd&)>;

  std::string label;
  Map density;
  Map derivative;

  /// F(x) = sum_i coeffs[i] x^i, with F' derived from the coefficients.
  static NonlinearTerm polynomial(std::string label, std::vector<double> coeffs);
  static NonlinearTerm zero(std::string label = "zero");
};

/// A gradient flow d(phi)/dt = -G mu, mu = L phi + sum_j F_j'(phi).
struct ModelSpec {
  std::string name;
  FourierMultiplier linear;    // L
  FourierMultiplier mobility;  // G
  std::vector<NonlinearTerm> terms;
  ParamMap params;

  [[nodiscard]] const GridSpec& grid() const noexcept { return linear.grid; }
  [[nodiscard]] double param(std::string_view key) const;
};

/// Builds one of the shipped models on `grid`:
///
///   allen_cahn          L = -Lap,            G = M,       F = (phi^2-1)^2 / (4 eps^2)
///   cahn_hilliard_beta  L = -eps^2 Lap + b,  G = -M Lap,  F = (phi^2-1-b)^2 / 4
///   pfc                 L = (1+Lap)^2 - eps, G = -M Lap,  F = phi^4 / 4
///   heat                L = -Lap,            G = 1,       F = 0 ("terms" = 1 or 2 zero terms)
///   custom_split        the cahn_hilliard_beta operators with F_1 = phi^4/4 and
///                       F_2 = -(1+b) phi^2 / 2 + (1+b)^2 / 4
///
/// Defaults: M = 1, beta = 2, C_sav = 1. epsilon is required where it appears.
ModelSpec build_model(std::string_view name, const ParamMap& params, const GridSpec& grid);

/// Assembles a model from caller-supplied pieces after validating it
/// (G positive semidefinite, one or two terms).
ModelSpec make_model(std::string name, FourierMultiplier linear, FourierMultiplier mobility,
                     std::vector<NonlinearTerm> terms, ParamMap params = {});

Field f_prime(const ModelSpec& model, std::size_t term, const Field& phi);
double f_integral(const ModelSpec& model, std::size_t term, const Field& phi);

/// Sum of f_integral over all terms, E_1(phi).
double nonlinear_energy(const ModelSpec& model, const Field& phi);

/// E(phi) = (phi, L phi)/2 + E_1(phi).
double energy_original(const ModelSpec& model, SpectralTransform& transform, const Field& phi);

}  // namespace gfzf
