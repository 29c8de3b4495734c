#pragma once

// Subcommand pipelines. Each one samples its replicas, writes CSV tables and
// an optional SVG plot into the output directory, then a pass/fail summary and
// a manifest with the config echo, seed paths and file digests.

#include <filesystem>
#include <string>
#include <vector>

#include "gmclab/config.hpp"
#include "gmclab/io.hpp"

namespace gmclab {

std::string artifact_version();

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  Subcommand subcommand = Subcommand::kChaos;
  std::filesystem::path out;
  std::vector<Check> checks;
  std::vector<OutputFile> files;
  double wall_seconds = 0.0;

  bool passed() const;
};

/// Throws ConfigError when validate_config reports anything.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace gmclab
