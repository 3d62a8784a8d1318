#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfzf/grid.hpp"
#include "gfzf/model.hpp"
#include "gfzf/schemes.hpp"
#include "gfzf/zero_factor.hpp"

namespace gfzf {

struct IcSpec {
  std::string name;
  ParamMap params;
};

/// A validated experiment description. See parse_config for the document format.
struct RunConfig {
  std::string name = "run";
  std::string model;
  ParamMap params;
  SchemeKind scheme = SchemeKind::rzf_cn;
  FactorSpec factor;
  FactorSpec factor2;
  std::string bootstrap = "rzf_cn";
  std::vector<int> dims;
  std::vector<double> extents;
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  double dt = 0.0;
  double T = 0.0;
  IcSpec ic;
  std::uint64_t seed = 0;
  std::vector<double> snapshot_times;
  bool assertions = true;
  bool dealias = false;
  std::optional<double> reference_dt;
  std::vector<double> dt_ladder;
  std::vector<SchemeKind> schemes;  // compare legs; empty means {scheme}
};

/// Parses and validates a JSON config document. Unknown keys are rejected.
///
///   {
///     "name": "ac_convergence",
///     "model": "allen_cahn", "params": {"epsilon": 0.4, "M": 1},
///     "scheme": "rzf_cn",
///     "factor": {"kind": "rate", "k": 1, "eta_init": 0},
///     "grid": {"dims": [128, 128], "extents": ["2pi", "2pi"], "origin": [0, 0]},
///     "dt": 0.01, "T": 1,
///     "ic": {"name": "cosine_product", "amplitude": 0.001},
///     "seed": 7, "snapshot_times": [0, 1], "assertions": true
///   }
///
/// Lengths may be numbers or strings such as "2pi", "-pi", "0.5*pi".
/// Defaults: factor rate with k = 1, factor2 = factor, C_sav = 1, assertions on,
/// bootstrap rzf_cn. Throws ConfigError naming the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo of a config (every default spelled out).
std::string config_to_json(const RunConfig& cfg, int indent = 2);

/// Parses a length such as 6.28, "2pi", "-pi" or "0.5*pi".
double parse_length(std::string_view text);

GridSpec grid_of(const RunConfig& cfg);
ModelSpec model_of(const RunConfig& cfg);
SchemeOptions options_of(const RunConfig& cfg);

}  // namespace gfzf
