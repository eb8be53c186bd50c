#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wedgelab/scenarios.hpp"

namespace {

struct VerbArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::string suite;  // verify only
};

int run_verb(const std::string& scenario, const VerbArgs& args) {
  using namespace wedgelab;
  ExperimentConfig cfg;
  try {
    cfg = load_config(args.config_path);
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  }
  if (cfg.scenario != scenario) {
    std::cerr << "config error: config.scenario is '" << cfg.scenario
              << "' but the invoked verb expects '" << scenario << "'\n";
    return exit_config_error;
  }
  if (!args.suite.empty()) cfg.raw["verify"]["suite"] = args.suite;
  return run_scenario(cfg, args.out_dir, args.seed, std::cout);
}

void add_common(CLI::App* sub, VerbArgs& args) {
  sub->add_option("--config", args.config_path, "experiment config (JSON)")->required();
  sub->add_option("--out", args.out_dir, "output directory");
  sub->add_option("--seed", args.seed, "master seed override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wedgelab: killed-chain kernel algebra and reflected diffusions in wedges"};
  app.require_subcommand(1);

  VerbArgs ergodic_args, wedge_args, simulate_args, kernels_args, verify_args;
  add_common(app.add_subcommand("ergodic", "synthetic killed-chain checks"), ergodic_args);
  add_common(app.add_subcommand("wedge", "cone analytics report"), wedge_args);
  add_common(app.add_subcommand("simulate", "reflected excursions"), simulate_args);
  add_common(app.add_subcommand("kernels", "empirical shell-to-shell kernels"), kernels_args);
  CLI::App* verify = app.add_subcommand("verify", "verification suites");
  add_common(verify, verify_args);
  verify->add_option("--suite", verify_args.suite, "kernel | wedge | sim | all")
      ->check(CLI::IsMember({"kernel", "wedge", "sim", "all"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("ergodic")) return run_verb("ergodic_synthetic", ergodic_args);
    if (app.got_subcommand("wedge")) return run_verb("wedge_analyze", wedge_args);
    if (app.got_subcommand("simulate")) return run_verb("simulate", simulate_args);
    if (app.got_subcommand("kernels")) return run_verb("estimate_kernels", kernels_args);
    if (app.got_subcommand("verify")) return run_verb("verify", verify_args);
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return wedgelab::exit_runtime_error;
  }
  return wedgelab::exit_config_error;
}
