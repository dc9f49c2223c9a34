#include "experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"regint: regularity-by-interpolation experiments"};
  app.require_subcommand(1);

  regint::cli::RunRequest req;
  CLI::App* run = app.add_subcommand("run", "Run one experiment and write its artifacts");
  run->add_option("--experiment,-e", req.experiment, "Experiment name (see `list`)")->required();
  run->add_option("--config,-c", req.config_path, "JSON parameter block");
  run->add_option("--seed,-s", req.seed, "64-bit seed");
  run->add_option("--workers,-w", req.workers, "Worker threads (0: all cores)");
  run->add_option("--out,-o", req.out_dir, "Output directory (default $TOOL_OUT, else ./runs)");

  CLI::App* list = app.add_subcommand("list", "List experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*list) {
    std::cout << regint::cli::list_experiments();
    return 0;
  }
  return regint::cli::run_command(req, std::cout, std::cerr).exit_code;
}
