// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file experiment.hpp
/// @brief Batch experiments driven by flat key=value configuration files.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holofredholm/models.hpp"
#include "holofredholm/nep.hpp"

namespace holofredholm {

/// Parsed configuration.  Keys use dotted sections, e.g. `contour.center_re`.
/// Level entries are cell counts of the nested meshes.
struct ExperimentConfig {
  std::string model;
  std::map<std::string, double> model_params;
  std::string experiment;
  std::vector<Index> levels;
  std::optional<Contour> contour;
  SolverOptions solver;
  double tcompat_tol = 1e-2;
  std::optional<Complex> tcompat_lambda;
  std::optional<Complex> stability_center;
  std::optional<double> stability_radius;
  int stability_samples = 16;
  std::optional<double> pollution_tol_match;
  double solve_match_tol = 1e-6;
  std::filesystem::path output_dir = ".";

  /// Strict parser: unknown or duplicate keys, malformed numbers and
  /// non-positive tolerances raise ConfigError.
  static ExperimentConfig parse(const std::string& text, const ModelRegistry& registry);
  static ExperimentConfig from_file(const std::filesystem::path& path, const ModelRegistry& registry);
};

/// Parses "32,64,128" into cell counts; throws ConfigError.
std::vector<Index> parse_levels(const std::string& text);

struct ExperimentOutcome {
  int status = 0;
  std::string report_csv;
  std::string summary;
  /// Empty unless the experiment produced a plot.
  std::string svg;
};

/// Runs the experiment without touching the filesystem.  Invariant failures
/// and numerical errors give status 1; invalid model parameters throw ConfigError.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const ModelRegistry& registry);

/// Runs and writes report.csv, summary.txt and (for converge) convergence.svg
/// into config.output_dir.  Returns the exit status.
int run(const ExperimentConfig& config, const ModelRegistry& registry);

}  // namespace holofredholm
