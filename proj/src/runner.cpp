#include "gfzf/runner.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "gfzf/errors.hpp"
#include "gfzf/initial_conditions.hpp"
#include "gfzf/io.hpp"

#ifndef GFZF_VERSION
#define GFZF_VERSION "unknown"
#endif

namespace gfzf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json manifest(const RunConfig& cfg, double wall) {
  return {{"config", json::parse(config_to_json(cfg))},
          {"version", std::string(version())},
          {"seed", cfg.seed},
          {"wall_seconds", wall}};
}

std::string stem(const RunConfig& cfg) { return cfg.name + "_" + std::string(to_string(cfg.scheme)); }

}  // namespace

std::string_view version() { return GFZF_VERSION; }

RunOutputs run_experiment(const RunConfig& cfg, const fs::path& out_dir, std::ostream* log) {
  ensure_dir(out_dir);
  const auto start = std::chrono::steady_clock::now();
  RunOutputs out;
  Stepper stepper(model_of(cfg), options_of(cfg));
  const Field phi0 = make_initial_condition(cfg.ic, grid_of(cfg), cfg.origin, cfg.seed);

  std::vector<bool> taken(cfg.snapshot_times.size(), false);
  long fallbacks = 0;
  const auto observe = [&](const StepReport& rep, const SchemeState& state) {
    if (rep.branch.ends_with("fallback") || rep.branch == "substep") {
      ++fallbacks;
      if (log != nullptr && fallbacks <= 20) *log << "step " << rep.step << ": " << rep.branch << " (" << rep.note << ")\n";
    }
    for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
      if (taken[i] || std::abs(state.t - cfg.snapshot_times[i]) > 0.5 * cfg.dt) continue;
      taken[i] = true;
      const fs::path path = out_dir / (stem(cfg) + "_t" + format_double(cfg.snapshot_times[i]) + ".gfzf");
      save_snapshot(path, Snapshot::of(state.phi_n, state.t, stepper.model().name));
      out.snapshots.push_back(path);
    }
  };
  out.trajectory = integrate(stepper, phi0, cfg.dt, cfg.T, observe);
  if (log != nullptr && fallbacks > 20) *log << fallbacks << " fallback or substep events in total\n";
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.trace = out_dir / (stem(cfg) + ".csv");
  save_trace_csv(out.trace, out.trajectory.trace);
  out.manifest = out_dir / (stem(cfg) + ".manifest.json");
  json m = manifest(cfg, out.wall_seconds);
  m["trace"] = out.trace.filename().string();
  json snaps = json::array();
  for (const auto& s : out.snapshots) snaps.push_back(s.filename().string());
  m["snapshots"] = snaps;
  write_text(out.manifest, m.dump(2) + "\n");
  return out;
}

ConvergenceTable run_convergence(const RunConfig& cfg, const fs::path& out_dir, std::vector<double> dt_ladder,
                                 std::ostream* log) {
  ensure_dir(out_dir);
  if (dt_ladder.empty()) dt_ladder = cfg.dt_ladder;
  if (dt_ladder.empty()) throw ConfigError("converge needs a dt ladder (--dt-ladder or 'dt_ladder')");
  const double ref = cfg.reference_dt.value_or(dt_ladder.back() / 16.0);
  const auto start = std::chrono::steady_clock::now();
  const ConvergenceTable table = convergence_study(cfg, dt_ladder, ref);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string csv = "dt,error,rate\n";
  for (std::size_t i = 0; i < table.dt.size(); ++i) {
    csv += format_double(table.dt[i]) + "," + format_double(table.error[i]) + ",";
    if (i > 0) csv += format_double(table.rate[i - 1]);
    csv += "\n";
  }
  const fs::path path = out_dir / (stem(cfg) + "_convergence.csv");
  write_text(path, csv);
  json m = manifest(cfg, wall);
  m["reference_dt"] = ref;
  m["dt_ladder"] = dt_ladder;
  m["table"] = path.filename().string();
  write_text(out_dir / (stem(cfg) + "_convergence.manifest.json"), m.dump(2) + "\n");
  if (log != nullptr) *log << csv;
  return table;
}

std::vector<RunOutputs> run_compare(const RunConfig& cfg, const fs::path& out_dir, std::vector<SchemeKind> schemes,
                                    std::ostream* log) {
  if (schemes.empty()) schemes = cfg.schemes;
  if (schemes.empty()) schemes = {cfg.scheme};
  std::vector<RunOutputs> out;
  for (auto s : schemes) {
    RunConfig leg = cfg;
    leg.scheme = s;
    if (s == SchemeKind::rmzf_cn && model_of(leg).terms.size() != 2) {
      throw ConfigError("compare leg rmzf_cn needs a two-term model");
    }
    out.push_back(run_experiment(leg, out_dir, log));
  }
  return out;
}

}  // namespace gfzf
