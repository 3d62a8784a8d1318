#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "gfzf/config.hpp"
#include "gfzf/diagnostics.hpp"
#include "gfzf/integrate.hpp"

namespace gfzf {

/// `git describe` of the source tree at build time.
std::string_view version();

struct RunOutputs {
  std::filesystem::path trace;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> snapshots;
  Trajectory trajectory;
  double wall_seconds = 0.0;
};

/// Runs one config and writes into out_dir:
///   <name>_<scheme>.csv            energy trace (kTraceHeader columns)
///   <name>_<scheme>_t<time>.gfzf   snapshots at cfg.snapshot_times
///   <name>_<scheme>.manifest.json  config echo, version, wall time
/// Fallback steps are reported on `log`. Throws AssertionFailure when an
/// enabled energy law fails, IoError when writing fails.
RunOutputs run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

/// Convergence study over dt_ladder against a same-scheme run at reference_dt
/// (default: min(dt_ladder) / 16). Writes <name>_<scheme>_convergence.csv
/// (dt,error,rate) and a manifest.
ConvergenceTable run_convergence(const RunConfig& cfg, const std::filesystem::path& out_dir,
                                 std::vector<double> dt_ladder, std::ostream* log = nullptr);

/// run_experiment once per scheme in `schemes` (cfg.schemes when empty).
std::vector<RunOutputs> run_compare(const RunConfig& cfg, const std::filesystem::path& out_dir,
                                    std::vector<SchemeKind> schemes, std::ostream* log = nullptr);

/// Fast oracle and invariant checks; prints one PASS/FAIL line each and
/// returns true when all pass.
bool selfcheck(std::ostream& out);

}  // namespace gfzf
