#include "gfzf/initial_conditions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gfzf/errors.hpp"

namespace gfzf {

namespace {

double get(const ParamMap& p, std::string_view key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double require(const ParamMap& p, std::string_view key, std::string_view ic) {
  const auto it = p.find(key);
  if (it == p.end()) {
    throw InvalidArgument("initial condition '" + std::string(ic) + "' requires '" + std::string(key) + "'");
  }
  return it->second;
}

double distance(const std::array<double, 3>& x, const std::array<double, 3>& c, int axes) {
  double s = 0.0;
  for (int a = 0; a < axes; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
  return std::sqrt(s);
}

Field random_field(const GridSpec& g, std::uint64_t seed) {
  Field f(g);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = uniform_at(seed, static_cast<std::uint64_t>(i));
  return f;
}

}  // namespace

double uniform_at(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return -1.0 + 2.0 * static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<std::string_view> ic_parameters(std::string_view name) {
  if (name == "cosine_product") return {"amplitude", "frequency"};
  if (name == "flower_tanh") return {"epsilon", "r0", "petal_amp", "petals"};
  if (name == "sphere_tanh") return {"epsilon", "radius", "cx", "cy", "cz"};
  if (name == "two_spheres_tanh") return {"epsilon", "radius", "x1", "y1", "z1", "x2", "y2", "z2"};
  if (name == "random_uniform") return {"amplitude", "mean"};
  if (name == "pfc_random") return {"phi0", "amplitude"};
  throw InvalidArgument("unknown initial condition '" + std::string(name) + "'");
}

Field make_initial_condition(const IcSpec& ic, const GridSpec& grid, std::array<double, 3> origin,
                             std::uint64_t seed) {
  const auto allowed = ic_parameters(ic.name);
  for (const auto& [key, _] : ic.params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidArgument("initial condition '" + ic.name + "' has no parameter '" + key + "'");
    }
  }
  const auto& p = ic.params;
  const int axes = grid.axes();
  const double sqrt2 = std::numbers::sqrt2;

  if (ic.name == "cosine_product") {
    const double amp = get(p, "amplitude", 1e-3);
    const double freq = get(p, "frequency", 1.0);
    return Field::sample(
        grid,
        [&](const auto& x) {
          double v = amp;
          for (int a = 0; a < axes; ++a) v *= std::cos(freq * x[a]);
          return v;
        },
        origin);
  }
  if (ic.name == "flower_tanh") {
    if (axes != 2) throw InvalidArgument("flower_tanh needs a 2D grid");
    const double eps = require(p, "epsilon", ic.name);
    const double r0 = get(p, "r0", 1.7);
    const double amp = get(p, "petal_amp", 1.2);
    const double petals = get(p, "petals", 6.0);
    return Field::sample(
        grid,
        [&](const auto& x) {
          const double theta = std::atan2(x[1], x[0]);
          const double r = std::hypot(x[0], x[1]);
          return std::tanh((r0 + amp * std::cos(petals * theta) - r) / (sqrt2 * eps));
        },
        origin);
  }
  if (ic.name == "sphere_tanh") {
    const double eps = require(p, "epsilon", ic.name);
    const double radius = get(p, "radius", 0.3);
    const std::array<double, 3> c{get(p, "cx", 0.5), get(p, "cy", 0.5), get(p, "cz", 0.5)};
    return Field::sample(
        grid, [&](const auto& x) { return std::tanh((distance(x, c, axes) - radius) / (sqrt2 * eps)); }, origin);
  }
  if (ic.name == "two_spheres_tanh") {
    const double eps = require(p, "epsilon", ic.name);
    const double radius = get(p, "radius", 0.14);
    const std::array<double, 3> c1{get(p, "x1", 0.5), get(p, "y1", 0.4), get(p, "z1", 0.5)};
    const std::array<double, 3> c2{get(p, "x2", 0.5), get(p, "y2", 0.7), get(p, "z2", 0.5)};
    return Field::sample(
        grid,
        [&](const auto& x) {
          return 1.0 - std::tanh((distance(x, c1, axes) - radius) / (sqrt2 * eps)) -
                 std::tanh((distance(x, c2, axes) - radius) / (sqrt2 * eps));
        },
        origin);
  }
  if (ic.name == "random_uniform") {
    Field f = random_field(grid, seed);
    f.values = get(p, "mean", 0.0) + get(p, "amplitude", 0.05) * f.values;
    return f;
  }
  // pfc_random
  Field f = random_field(grid, seed);
  f.values -= f.values.mean();
  f.values = get(p, "phi0", 0.25) + get(p, "amplitude", 0.01) * f.values;
  return f;
}

}  // namespace gfzf
