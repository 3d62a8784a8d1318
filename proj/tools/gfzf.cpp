// gfzf: command-line front end.
//
//   gfzf run       --config c.json --out dir [--seed N] [--no-assert]
//   gfzf converge  --config c.json --out dir [--dt-ladder "0.1,0.05"]
//   gfzf compare   --config c.json --out dir [--schemes "sav_cn,rzf_cn"]
//   gfzf selfcheck
//
// Exit codes: 0 ok, 2 config error, 3 assertion or numerical failure, 4 I/O error.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gfzf/config.hpp"
#include "gfzf/errors.hpp"
#include "gfzf/runner.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  bool no_assert = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config")->required();
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "override the config seed");
  cmd->add_flag("--no-assert", c.no_assert, "disable runtime energy-law assertions");
}

gfzf::RunConfig load(const Common& c) {
  gfzf::RunConfig cfg = gfzf::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.no_assert) cfg.assertions = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral zero-factor gradient-flow solver"};
  app.require_subcommand(1);

  Common run_opts, conv_opts, cmp_opts;
  std::string ladder, schemes;
  auto* run = app.add_subcommand("run", "integrate one config");
  add_common(run, run_opts);
  auto* conv = app.add_subcommand("converge", "convergence study against a fine same-scheme reference");
  add_common(conv, conv_opts);
  conv->add_option("--dt-ladder", ladder, "comma separated dt list, descending");
  auto* cmp = app.add_subcommand("compare", "run one config under several schemes");
  add_common(cmp, cmp_opts);
  cmp->add_option("--schemes", schemes, "comma separated scheme names");
  auto* check = app.add_subcommand("selfcheck", "oracle and invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto cfg = load(run_opts);
      const auto out = gfzf::run_experiment(cfg, run_opts.out, &std::cerr);
      std::cout << "wrote " << out.trace.string() << " (" << out.trajectory.trace.size() - 1 << " steps, "
                << out.wall_seconds << " s)\n";
    } else if (*conv) {
      const auto cfg = load(conv_opts);
      std::vector<double> dts;
      for (const auto& s : split_list(ladder)) dts.push_back(gfzf::parse_length(s));
      gfzf::run_convergence(cfg, conv_opts.out, dts, &std::cout);
    } else if (*cmp) {
      const auto cfg = load(cmp_opts);
      std::vector<gfzf::SchemeKind> kinds;
      for (const auto& s : split_list(schemes)) kinds.push_back(gfzf::parse_scheme(s));
      for (const auto& out : gfzf::run_compare(cfg, cmp_opts.out, kinds, &std::cerr)) {
        std::cout << "wrote " << out.trace.string() << "\n";
      }
    } else if (*check) {
      return gfzf::selfcheck(std::cout) ? 0 : 3;
    }
  } catch (const gfzf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gfzf::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gfzf::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const gfzf::Error& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
