#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "gfzf/config.hpp"
#include "gfzf/diagnostics.hpp"
#include "gfzf/errors.hpp"
#include "gfzf/initial_conditions.hpp"
#include "gfzf/io.hpp"
#include "gfzf/runner.hpp"
#include "support.hpp"

using namespace gfzf;
using namespace gfzf::testing;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"model": "allen_cahn", "params": {"epsilon": 0.4},
  "grid": {"dims": [16, 16], "extents": ["2pi", "2pi"]}, "dt": 0.1, "T": 1,
  "ic": {"name": "cosine_product", "amplitude": 0.001}})";

std::string with(const std::string& extra) {
  std::string s = kMinimal;
  s.insert(s.rfind('}'), ", " + extra);
  return s;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gfzf_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Config, MinimalGetsDefaults) {
  const RunConfig cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.scheme, SchemeKind::rzf_cn);
  EXPECT_EQ(cfg.factor.kind, FactorKind::rate);
  EXPECT_EQ(cfg.factor.k, 1.0);
  EXPECT_TRUE(cfg.assertions);
  EXPECT_FALSE(cfg.dealias);
  EXPECT_EQ(cfg.bootstrap, "rzf_cn");
  EXPECT_DOUBLE_EQ(cfg.extents[0], kTwoPi);
  EXPECT_EQ(model_of(cfg).param("C_sav"), 1.0);
  EXPECT_EQ(model_of(cfg).param("M"), 1.0);
}

TEST(Config, Bdf2RecordsBootstrap) {
  const RunConfig cfg = parse_config(with(R"("scheme": "rzf_bdf2")"));
  EXPECT_EQ(cfg.scheme, SchemeKind::rzf_bdf2);
  EXPECT_EQ(cfg.bootstrap, "rzf_cn");
  EXPECT_NE(config_to_json(cfg).find("\"bootstrap\": \"rzf_cn\""), std::string::npos);
  EXPECT_NE(config_error(with(R"("scheme": "rzf_bdf2", "bootstrap": "euler")")), "");
}

TEST(Config, ErrorsNameTheKey) {
  std::string text = kMinimal;
  text.replace(text.find("\"dt\": 0.1"), 9, "\"dt\": 0");
  EXPECT_NE(config_error(text).find("dt"), std::string::npos);
  EXPECT_NE(config_error(with(R"("sheme": "rzf_cn")")).find("sheme"), std::string::npos);
  EXPECT_NE(config_error(with(R"("scheme": "rk4")")).find("scheme"), std::string::npos);
  EXPECT_NE(config_error(R"({"model": "heat", "dt": 0.1, "T": 1})").find("grid"), std::string::npos);
  EXPECT_NE(config_error(with(R"("snapshot_times": [2])")).find("snapshot_times"), std::string::npos);
  EXPECT_NE(config_error(with(R"("factor": {"kind": "rate", "k": 0})")), "");
  EXPECT_NE(config_error(with(R"("scheme": "rmzf_cn")")), "");
  EXPECT_NE(config_error("{not json"), "");
}

TEST(Config, RoundTripThroughCanonicalJson) {
  const RunConfig a = parse_config(with(R"("scheme": "sav_cn", "seed": 11, "snapshot_times": [0, 0.5, 1],
      "dt_ladder": [0.1, 0.05], "reference_dt": 0.001, "schemes": ["sav_cn", "rzf_cn"])"));
  const RunConfig b = parse_config(config_to_json(a));
  EXPECT_EQ(config_to_json(a), config_to_json(b));
  EXPECT_EQ(b.seed, 11u);
  EXPECT_EQ(b.schemes.size(), 2u);
  ASSERT_TRUE(b.reference_dt.has_value());
  EXPECT_EQ(*b.reference_dt, 0.001);
}

TEST(Config, LengthExpressions) {
  EXPECT_DOUBLE_EQ(parse_length("2pi"), 2 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_length("-pi"), -std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_length("0.5*pi"), 0.5 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_length("100"), 100.0);
  EXPECT_THROW(parse_length("two"), InvalidArgument);
}

TEST(Config, ShippedConfigsParse) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(GFZF_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    EXPECT_NO_THROW({
      const RunConfig cfg = load_config(entry.path());
      model_of(cfg);
      Stepper s(model_of(cfg), options_of(cfg));
    }) << entry.path();
  }
  EXPECT_GT(count, 5);
}

TEST(InitialCondition, CosineProductAmplitude) {
  const Field f = make_initial_condition({"cosine_product", {{"amplitude", 0.001}}}, grid2(128), {}, 0);
  EXPECT_DOUBLE_EQ(f.values.abs().maxCoeff(), 0.001);
}

TEST(InitialCondition, PfcRandomMean) {
  for (std::uint64_t seed : {0ull, 1ull, 123456789ull}) {
    const Field f = make_initial_condition({"pfc_random", {{"phi0", 0.25}}}, grid2(64, 100.0), {}, seed);
    EXPECT_NEAR(mean(f), 0.25, 1e-14);
    EXPECT_GT(f.values.maxCoeff() - f.values.minCoeff(), 0.01);
  }
}

TEST(InitialCondition, FlowerInterfaceAtTipOfPetal) {
  const std::array<int, 2> d{4, 4};
  const std::array<double, 2> e{5.8, 5.8};
  const Field f = make_initial_condition({"flower_tanh", {{"epsilon", 0.05}}}, make_grid(d, e), {0, 0, 0}, 0);
  // node (2, 0) sits at x = 2.9, y = 0
  EXPECT_NEAR(f.values[2 * 4 + 0], 0.0, 1e-12);
  EXPECT_NEAR(f.values[0], 1.0, 1e-12);
}

TEST(InitialCondition, TwoSpheresInsideOutside) {
  const GridSpec g = grid3(20, 1.0);
  const Field f = make_initial_condition({"two_spheres_tanh", {{"epsilon", 0.01}}}, g, {}, 0);
  // centre of the first sphere at (0.5, 0.4, 0.5): node (10, 8, 10)
  EXPECT_NEAR(f.values[flat_node(g, {10, 8, 10})], 1.0, 1e-6);
  EXPECT_NEAR(f.values[flat_node(g, {0, 0, 0})], -1.0, 1e-6);
}

TEST(InitialCondition, SeededRandomIsReproducible) {
  const GridSpec g = grid2(16);
  const IcSpec ic{"random_uniform", {{"amplitude", 0.5}}};
  const Field a = make_initial_condition(ic, g, {}, 7);
  const Field b = make_initial_condition(ic, g, {}, 7);
  const Field c = make_initial_condition(ic, g, {}, 8);
  EXPECT_EQ(max_abs_difference(a, b), 0.0);
  EXPECT_GT(max_abs_difference(a, c), 0.0);
  EXPECT_LE(a.values.abs().maxCoeff(), 0.5);
  EXPECT_EQ(uniform_at(7, 0), a.values[0] / 0.5);
}

TEST(InitialCondition, UniformDeviatesCoverRange) {
  double lo = 1, hi = -1, sum = 0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = uniform_at(2024, i);
    ASSERT_GE(u, -1.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_LT(lo, -0.999);
  EXPECT_GT(hi, 0.999);
  EXPECT_NEAR(sum / 100000, 0.0, 0.01);
}

TEST(InitialCondition, UnknownNameOrParameter) {
  EXPECT_THROW(make_initial_condition({"gaussian", {}}, grid2(8), {}, 0), InvalidArgument);
  EXPECT_THROW(make_initial_condition({"cosine_product", {{"amp", 1}}}, grid2(8), {}, 0), InvalidArgument);
  EXPECT_THROW(make_initial_condition({"flower_tanh", {}}, grid2(8), {}, 0), InvalidArgument);
}

TEST(Snapshot, ZeroFieldPayload) {
  const GridSpec g = grid2(4);
  const std::string bytes = write_snapshot(Snapshot::of(Field(g), 0.0, "heat"));
  const auto eol = bytes.find('\n');
  ASSERT_NE(eol, std::string::npos);
  EXPECT_TRUE(bytes.starts_with("GFZF1 2 4 4 "));
  EXPECT_EQ(bytes.size() - eol - 1, 128u);
  for (std::size_t i = eol + 1; i < bytes.size(); ++i) EXPECT_EQ(bytes[i], '\0');
}

TEST(Snapshot, BitExactRoundTrip) {
  const GridSpec g = grid3(8);
  Field f = noise(g, 77);
  f.values[3] = -0.0;
  f.values[4] = 1e-310;
  const Snapshot s = Snapshot::of(f, 0.1 + 0.2, "cahn_hilliard_beta");
  const std::string once = write_snapshot(s);
  const Snapshot back = read_snapshot(once);
  EXPECT_EQ(back, s);
  EXPECT_EQ(write_snapshot(back), once);
  EXPECT_TRUE(std::signbit(back.values[3]));
  EXPECT_EQ(max_abs_difference(back.field(), f), 0.0);

  const fs::path p = scratch("snap.gfzf");
  save_snapshot(p, s);
  EXPECT_EQ(load_snapshot(p), s);
  fs::remove(p);
}

TEST(Snapshot, RejectsBadInput) {
  std::string bytes = "GFZF1 2 8 8 1 1 0 heat\n" + std::string(800, '\0');
  EXPECT_THROW(read_snapshot(bytes), IoError);
  bytes = write_snapshot(Snapshot::of(Field(grid2(4)), 0.0, "heat"));
  bytes[4] = '2';
  EXPECT_THROW(read_snapshot(bytes), IoError);
  EXPECT_THROW(read_snapshot("GFZF1 2 4 4"), IoError);
  EXPECT_THROW(load_snapshot(scratch("missing.gfzf")), IoError);
}

TEST(TraceCsv, HeaderAndRoundTrip) {
  SchemeOptions o;
  Stepper s(build_model("allen_cahn", {{"epsilon", 0.4}}, grid2(16)), o);
  const auto traj = integrate(s, noise(grid2(16), 4, 0.5), 0.05, 0.5);
  std::stringstream ss;
  write_trace_csv(ss, traj.trace);
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first, kTraceHeader);
  ss.seekg(0);
  const auto rows = read_trace_csv(ss);
  ASSERT_EQ(rows.size(), traj.trace.size());
  EXPECT_EQ(rows[0].branch, "initial");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].step, traj.trace[i].step);
    EXPECT_EQ(rows[i].t, traj.trace[i].t);
    EXPECT_EQ(rows[i].E_mod, traj.trace[i].E_mod);
    EXPECT_EQ(rows[i].dissipation, traj.trace[i].dissipation);
    EXPECT_EQ(rows[i].kappa, traj.trace[i].kappa);
    EXPECT_EQ(rows[i].branch, traj.trace[i].branch);
    if (i > 0) EXPECT_GT(rows[i].t, rows[i - 1].t);
  }
  EXPECT_TRUE(replay_energy_trace(rows, SchemeKind::rzf_cn).empty());
}

TEST(TraceCsv, RejectsWrongHeader) {
  std::stringstream ss("step,t,E\n1,2,3\n");
  EXPECT_THROW(read_trace_csv(ss), IoError);
}

TEST(Runner, WritesTraceSnapshotsAndManifest) {
  RunConfig cfg = parse_config(with(R"("name": "unit", "scheme": "rzf_bdf2", "snapshot_times": [0, 0.5, 1])"));
  const fs::path dir = scratch("runner");
  const RunOutputs out = run_experiment(cfg, dir);
  EXPECT_EQ(out.trace.filename(), "unit_rzf_bdf2.csv");
  ASSERT_EQ(out.snapshots.size(), 3u);
  EXPECT_EQ(out.snapshots[1].filename(), "unit_rzf_bdf2_t0.5.gfzf");
  const Snapshot last = load_snapshot(out.snapshots[2]);
  EXPECT_EQ(last.time, 1.0);
  EXPECT_EQ(last.field().values.matrix(), out.trajectory.state.phi_n.values.matrix());

  const auto rows = load_trace_csv(out.trace);
  EXPECT_EQ(rows.size(), 11u);
  EXPECT_TRUE(replay_energy_trace(rows, SchemeKind::rzf_bdf2).empty());

  const auto manifest = nlohmann::json::parse(slurp(out.manifest));
  EXPECT_EQ(manifest["version"], std::string(version()));
  EXPECT_EQ(manifest["seed"], 0);
  EXPECT_TRUE(manifest.contains("wall_seconds"));
  EXPECT_EQ(manifest["trace"], "unit_rzf_bdf2.csv");
  // the manifest alone reproduces the run
  const RunConfig again = parse_config(manifest["config"].dump());
  EXPECT_EQ(config_to_json(again), config_to_json(cfg));
  fs::remove_all(dir);
}

TEST(Runner, RerunIsBitIdentical) {
  RunConfig cfg = parse_config(kMinimal);
  cfg.ic = {"random_uniform", {{"amplitude", 0.3}}};
  cfg.seed = 99;
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  run_experiment(cfg, a);
  run_experiment(cfg, b);
  EXPECT_EQ(slurp(a / "run_rzf_cn.csv"), slurp(b / "run_rzf_cn.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Runner, HeatTraceColumns) {
  RunConfig cfg = parse_config(kMinimal);
  cfg.model = "heat";
  cfg.params.clear();
  cfg.ic = {"cosine_product", {{"amplitude", 1.0}}};
  const fs::path dir = scratch("heat");
  const auto out = run_experiment(cfg, dir);
  const auto rows = load_trace_csv(out.trace);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].E_orig, rows[i - 1].E_orig);
    EXPECT_EQ(rows[i].p_value, 0.0);
  }
  fs::remove_all(dir);
}

TEST(Runner, CompareAndConverge) {
  RunConfig cfg = parse_config(with(R"("name": "cmp", "schemes": ["sav_cn", "rzf_cn"])"));
  const fs::path dir = scratch("compare");
  const auto legs = run_compare(cfg, dir, {});
  ASSERT_EQ(legs.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "cmp_sav_cn.csv"));
  EXPECT_TRUE(fs::exists(dir / "cmp_rzf_cn.csv"));
  const auto table = run_convergence(cfg, dir, {0.1, 0.05, 0.025}, nullptr);
  EXPECT_EQ(table.rate.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "cmp_rzf_cn_convergence.csv"));
  fs::remove_all(dir);
}
