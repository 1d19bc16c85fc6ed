#include <iostream>

#include <CLI11.hpp>

#include "slungmpc_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace slungmpc::cli;
  CLI::App app{"Slung-payload quadrotor NMPC: closed-loop runs, ablations, scenario checks"};
  app.require_subcommand(1);

  Options options;
  std::uint64_t seed = 0;
  int trials = 0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", options.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--set", options.overrides, "Override a scenario entry, section.key=value")
        ->allow_extra_args(false);
  };
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", options.out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", seed, "Master seed (replaces sim.seed)");
    cmd->add_option("--arm", options.arms, "Controller arm; repeatable for ablate")
        ->allow_extra_args(false);
  };

  CLI::App* run = app.add_subcommand("run", "Simulate one closed-loop run");
  add_common(run);
  add_output(run);
  CLI::App* ablate = app.add_subcommand("ablate", "Run the arm x trial ablation matrix");
  add_common(ablate);
  add_output(ablate);
  ablate->add_option("--trials", trials, "Trials per arm (replaces sim.trials)")
      ->check(CLI::PositiveNumber);
  ablate->add_option("--threads", options.threads, "Worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario without running it");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (run->count("--seed") || ablate->count("--seed")) options.seed = seed;
  if (ablate->count("--trials")) options.trials = trials;

  if (*run) return cmd_run(options, std::cout, std::cerr);
  if (*ablate) return cmd_ablate(options, std::cout, std::cerr);
  return cmd_validate(options, std::cout, std::cerr);
}
