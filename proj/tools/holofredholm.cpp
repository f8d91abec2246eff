// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "holofredholm/errors.hpp"
#include "holofredholm/experiment.hpp"

int main(int argc, char** argv) {
  using namespace holofredholm;
  CLI::App app{"Galerkin eigenvalue experiments for holomorphic Fredholm operator functions"};
  app.require_subcommand(1);

  std::string config_path, output_dir, levels;
  long long seed = -1;
  auto* run_cmd = app.add_subcommand("run", "run the experiment described by a key=value config file");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--output-dir", output_dir, "directory for report.csv, summary.txt and plots");
  run_cmd->add_option("--seed", seed, "seed of the random probe blocks")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--levels", levels, "comma-separated cell counts of the mesh levels");
  auto* list_cmd = app.add_subcommand("list-models", "print the built-in models and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const ModelRegistry registry = ModelRegistry::with_defaults();
  if (list_cmd->parsed()) {
    std::cout << registry.listing();
    return 0;
  }
  try {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path, registry);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (seed >= 0) cfg.solver.seed = static_cast<std::uint64_t>(seed);
    if (!levels.empty()) cfg.levels = parse_levels(levels);
    const int status = run(cfg, registry);
    std::cout << (status == 0 ? "pass" : "fail") << ": see " << (cfg.output_dir / "summary.txt").string() << "\n";
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
