#include "gfzf/model.hpp"

#include <string>

#include "gfzf/errors.hpp"

namespace gfzf {

namespace {

Eigen::ArrayXd horner(const std::vector<double>& c, const Eigen::ArrayXd& x) {
  if (c.empty()) return Eigen::ArrayXd::Zero(x.size());
  Eigen::ArrayXd acc = Eigen::ArrayXd::Constant(x.size(), c.back());
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    acc = acc * x + c[i];
  }
  return acc;
}

double lookup(const ParamMap& params, std::string_view key, std::string_view model) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw InvalidArgument("model '" + std::string(model) + "' requires parameter '" +
                          std::string(key) + "'");
  }
  return it->second;
}

double lookup_or(const ParamMap& params, std::string_view key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void require_index(const ModelSpec& model, std::size_t term) {
  if (term >= model.terms.size()) {
    throw InvalidArgument("nonlinear term index " + std::to_string(term) + " out of range for model '" +
                          model.name + "'");
  }
}

}  // namespace

NonlinearTerm NonlinearTerm::polynomial(std::string label, std::vector<double> coeffs) {
  std::vector<double> deriv;
  for (std::size_t i = 1; i < coeffs.size(); ++i) deriv.push_back(static_cast<double>(i) * coeffs[i]);
  NonlinearTerm t;
  t.label = std::move(label);
  t.density = [c = std::move(coeffs)](const Eigen::ArrayXd& x) { return horner(c, x); };
  t.derivative = [d = std::move(deriv)](const Eigen::ArrayXd& x) { return horner(d, x); };
  return t;
}

NonlinearTerm NonlinearTerm::zero(std::string label) {
  NonlinearTerm t;
  t.label = std::move(label);
  t.density = [](const Eigen::ArrayXd& x) -> Eigen::ArrayXd { return Eigen::ArrayXd::Zero(x.size()); };
  t.derivative = t.density;
  return t;
}

double ModelSpec::param(std::string_view key) const { return lookup(params, key, name); }

ModelSpec make_model(std::string name, FourierMultiplier linear, FourierMultiplier mobility,
                     std::vector<NonlinearTerm> terms, ParamMap params) {
  if (!(linear.grid == mobility.grid)) throw GridMismatch();
  if (terms.empty() || terms.size() > 2) {
    throw InvalidArgument("a model carries one or two nonlinear terms, got " +
                          std::to_string(terms.size()));
  }
  if (mobility.symbol.minCoeff() < -1e-12) {
    throw InvalidArgument("mobility operator of model '" + name + "' is not positive semidefinite");
  }
  return {std::move(name), std::move(linear), std::move(mobility), std::move(terms), std::move(params)};
}

ModelSpec build_model(std::string_view name, const ParamMap& params, const GridSpec& grid) {
  ParamMap p = params;
  p.try_emplace("C_sav", 1.0);
  const auto lap = laplacian_symbol(grid);
  const auto one = FourierMultiplier::constant(grid, 1.0);

  if (name == "allen_cahn") {
    const double eps = lookup(p, "epsilon", name);
    const double m = lookup_or(p, "M", 1.0);
    p.try_emplace("M", m);
    const double c = 1.0 / (4.0 * eps * eps);
    return make_model("allen_cahn", -1.0 * lap, m * one,
                      {NonlinearTerm::polynomial("double_well", {c, 0.0, -2.0 * c, 0.0, c})}, p);
  }
  if (name == "cahn_hilliard_beta" || name == "custom_split") {
    const double eps = lookup(p, "epsilon", name);
    const double m = lookup_or(p, "M", 1.0);
    const double beta = lookup_or(p, "beta", 2.0);
    p.try_emplace("M", m);
    p.try_emplace("beta", beta);
    auto linear = (-eps * eps) * lap + beta * one;
    auto mobility = (-m) * lap;
    const double s = 1.0 + beta;
    if (name == "cahn_hilliard_beta") {
      return make_model("cahn_hilliard_beta", std::move(linear), std::move(mobility),
                        {NonlinearTerm::polynomial("shifted_double_well",
                                                   {0.25 * s * s, 0.0, -0.5 * s, 0.0, 0.25})},
                        p);
    }
    return make_model("custom_split", std::move(linear), std::move(mobility),
                      {NonlinearTerm::polynomial("quartic", {0.0, 0.0, 0.0, 0.0, 0.25}),
                       NonlinearTerm::polynomial("quadratic", {0.25 * s * s, 0.0, -0.5 * s})},
                      p);
  }
  if (name == "pfc") {
    const double eps = lookup(p, "epsilon", name);
    const double m = lookup_or(p, "M", 1.0);
    p.try_emplace("M", m);
    auto linear = FourierMultiplier::from_wavevector(grid, [eps](const auto&, double k2) {
      return (1.0 - k2) * (1.0 - k2) - eps;
    });
    return make_model("pfc", std::move(linear), (-m) * lap,
                      {NonlinearTerm::polynomial("quartic", {0.0, 0.0, 0.0, 0.0, 0.25})}, p);
  }
  if (name == "heat") {
    const double count = lookup_or(p, "terms", 1.0);
    if (count != 1.0 && count != 2.0) throw InvalidArgument("heat model takes terms = 1 or 2");
    std::vector<NonlinearTerm> terms(static_cast<std::size_t>(count), NonlinearTerm::zero());
    return make_model("heat", -1.0 * lap, one, std::move(terms), p);
  }
  throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

Field f_prime(const ModelSpec& model, std::size_t term, const Field& phi) {
  require_index(model, term);
  return Field(phi.grid, model.terms[term].derivative(phi.values));
}

double f_integral(const ModelSpec& model, std::size_t term, const Field& phi) {
  require_index(model, term);
  return phi.grid.cell_volume() * model.terms[term].density(phi.values).sum();
}

double nonlinear_energy(const ModelSpec& model, const Field& phi) {
  double e = 0.0;
  for (std::size_t j = 0; j < model.terms.size(); ++j) e += f_integral(model, j, phi);
  return e;
}

double energy_original(const ModelSpec& model, SpectralTransform& transform, const Field& phi) {
  return 0.5 * quadratic_form(transform.forward(phi), model.linear) + nonlinear_energy(model, phi);
}

}  // namespace gfzf
