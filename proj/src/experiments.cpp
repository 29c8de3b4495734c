#include "gmclab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>

#include "gmclab/parallel.hpp"
#include "pipeline.hpp"

#ifndef GMCLAB_VERSION
#define GMCLAB_VERSION "0.0.0"
#endif

namespace gmclab {

std::string artifact_version() { return GMCLAB_VERSION; }

bool RunResult::passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

namespace detail {

Truncation choose_truncation(const ExperimentConfig& c, double volume, double alpha) {
  if (c.z_min) return Truncation::at(*c.z_min);
  if (c.atoms_expected > 0.0) return Truncation::expected_count(c.atoms_expected, volume, alpha);
  return Truncation::relative(volume, alpha, 1.0, c.z_ratio);
}

std::vector<Box> tiling_boxes(int d, double lambda) {
  const auto per = static_cast<int>(std::llround(1.0 / lambda));
  std::vector<Box> out;
  for (int j = 0; j < (d == 2 ? per : 1); ++j) {
    for (int i = 0; i < per; ++i) {
      if (d == 1) {
        out.push_back(Box::interval(i * lambda, (i + 1) * lambda));
      } else {
        out.push_back(Box::square(i * lambda, j * lambda, (i + 1) * lambda, (j + 1) * lambda));
      }
    }
  }
  return out;
}

}  // namespace detail

RunResult run_experiment(const ExperimentConfig& cfg) {
  if (auto diags = validate_config(cfg); !diags.empty()) throw ConfigError(std::move(diags));
  const auto start = std::chrono::steady_clock::now();
  detail::Run run{cfg, OutputDir(cfg.out), {}, {}, {}};

  switch (cfg.subcommand) {
    case Subcommand::kField: detail::run_field(run); break;
    case Subcommand::kChaos: detail::run_chaos(run); break;
    case Subcommand::kAtoms: detail::run_atoms(run); break;
    case Subcommand::kSpectrum: detail::run_spectrum(run); break;
    case Subcommand::kLaplace: detail::run_laplace(run); break;
    case Subcommand::kTail: detail::run_tail(run); break;
    case Subcommand::kScaling: detail::run_scaling(run); break;
    case Subcommand::kKpz: detail::run_kpz(run); break;
    case Subcommand::kDuality: detail::run_duality(run); break;
    case Subcommand::kLq: detail::run_lq(run); break;
  }

  RunResult result;
  result.subcommand = cfg.subcommand;
  result.out = run.dir.root();
  result.checks = run.checks;

  nlohmann::ordered_json summary;
  summary["subcommand"] = to_string(cfg.subcommand);
  summary["passed"] = result.passed();
  summary["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : run.checks) {
    summary["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  auto& notes = summary["notes"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : run.notes) notes[k] = v;
  run.dir.write("summary.json", summary.dump(2) + "\n");

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.files = run.dir.files();

  nlohmann::ordered_json manifest;
  manifest["artifact"] = "gmclab";
  manifest["version"] = artifact_version();
  manifest["subcommand"] = to_string(cfg.subcommand);
  auto& echo = manifest["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.echo()) echo[k] = v;
  manifest["workers"] = worker_count();
  manifest["seed_paths"] = {
      {"template", "seed=" + std::to_string(cfg.seed) + "/replica={0.." + std::to_string(cfg.replicas - 1) +
                       "}/<stream>"},
      {"streams", run.streams}};
  manifest["wall_clock_seconds"] = result.wall_seconds;
  manifest["files"] = nlohmann::ordered_json::array();
  for (const auto& f : result.files) {
    manifest["files"].push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  }
  run.dir.write("manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace gmclab
