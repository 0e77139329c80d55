// SPDX-License-Identifier: Apache-2.0
//
// trishare: sequential tripartite nonlocality sharing simulator.

#include "trishare/report.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{
      "Sequential sharing of tripartite nonlocality: evaluate scenario files, optimize "
      "measurement settings and sharpness schedules, sweep sharpness grids, and run the "
      "built-in reference and property batteries."};
  app.require_subcommand(1);

  trishare::RunManifest manifest;

  auto add_common = [&](CLI::App* cmd, bool with_config, bool with_search_knobs) {
    if (with_config)
      cmd->add_option("--config", manifest.input_path, "scenario/search config file");
    cmd->add_option("--out", manifest.output_path, "output file path ('-' for stdout)");
    cmd->add_option("--format", manifest.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", manifest.seed, "root seed for all random streams");
    if (with_search_knobs) {
      cmd->add_option("--budget", manifest.budget, "max objective evaluations");
      cmd->add_option("--restarts", manifest.restarts, "multistart count");
    }
    cmd->add_flag("--allow-unsharp-final", manifest.allow_unsharp_final,
                  "accept scenarios whose final Charlie is unsharp");
  };

  CLI::App* evaluate = app.add_subcommand("evaluate", "per-Charlie inequality values of a scenario");
  add_common(evaluate, true, false);
  evaluate->get_option("--config")->required();

  CLI::App* optimize = app.add_subcommand("optimize", "constrained search over angles and sharpness");
  add_common(optimize, true, true);
  optimize->get_option("--config")->required();
  optimize->add_flag("--fix-paper-angles", manifest.fix_reference_angles,
                     "pin angles to the built-in reference settings; optimize sharpness only");

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over per-Charlie sharpness values");
  add_common(sweep, true, true);
  sweep->get_option("--config")->required();

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "run the pinned reference-value battery");
  add_common(reproduce, false, true);

  CLI::App* oracle =
      app.add_subcommand("oracle-check", "oracle-equivalence and no-signalling property suites");
  add_common(oracle, false, false);

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* cmd : {evaluate, optimize, sweep, reproduce, oracle})
    if (cmd->parsed()) manifest.command = cmd->get_name();

  return trishare::run_command(manifest, std::cerr);
}
