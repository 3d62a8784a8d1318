#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gfzf/config.hpp"
#include "gfzf/field.hpp"
#include "gfzf/grid.hpp"

namespace gfzf {

/// Uniform deviate on [-1, 1) at position `index` of the stream `seed`.
/// Stateless (SplitMix64 of a counter), so values do not depend on visiting order.
double uniform_at(std::uint64_t seed, std::uint64_t index);

/// Parameter names accepted by an initial condition; throws for unknown names.
///
///   cosine_product    amplitude * prod_i cos(frequency * x_i)
///   flower_tanh       tanh((r0 + petal_amp cos(petals theta) - |x|) / (sqrt2 epsilon))
///   sphere_tanh       tanh((|x - c| - radius) / (sqrt2 epsilon))
///   two_spheres_tanh  1 - sum_i tanh((|x - c_i| - radius) / (sqrt2 epsilon))
///   random_uniform    mean + amplitude * rand
///   pfc_random        phi0 + amplitude * (rand - mean(rand))
std::vector<std::string_view> ic_parameters(std::string_view name);

/// Evaluates the named initial condition at the nodes x_i = origin_i + j_i h_i.
Field make_initial_condition(const IcSpec& ic, const GridSpec& grid, std::array<double, 3> origin,
                             std::uint64_t seed);

}  // namespace gfzf
