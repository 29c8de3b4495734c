#pragma once

// Experiment configuration: flat key=value text with dotted keys and '#'
// comments, typed into an ExperimentConfig and checked by validate_config.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmclab/field.hpp"
#include "gmclab/kernels.hpp"

namespace gmclab {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// Sorted, so echoes are deterministic.
using ConfigMap = std::map<std::string, std::string>;

/// Throws ConfigError on malformed lines or duplicate keys.
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

enum class Subcommand { kField, kChaos, kAtoms, kSpectrum, kLaplace, kTail, kScaling, kKpz, kDuality, kLq };
std::string to_string(Subcommand s);
Subcommand parse_subcommand(const std::string& name);
const std::vector<std::string>& subcommand_names();

enum class AlphaMode { kDuality, kExplicit };
enum class ConstructionChoice { kDirect, kSubordinated, kBoth };

struct ExperimentConfig {
  Subcommand subcommand = Subcommand::kChaos;
  int d = 1;
  KernelSpec kernel;
  double gamma2 = 0.5;
  int level = 6;
  int grid = 1024;
  SamplerBackend backend = SamplerBackend::kAuto;
  int replicas = 100;
  std::uint64_t seed = 1;

  AlphaMode alpha_mode = AlphaMode::kDuality;
  double alpha = 0.25;                 // used in explicit mode
  std::optional<double> z_min;         // empty = automatic rule
  double z_ratio = 1e-3;
  double atoms_expected = 0.0;         // > 0 fixes z_min by expected atom count
  ConstructionChoice construction = ConstructionChoice::kBoth;

  std::vector<double> lambdas;
  std::vector<double> q_grid;
  std::vector<double> u_grid;
  std::vector<double> s_grid;
  std::vector<double> gamma2_sweep;
  std::vector<int> cover_levels;
  std::vector<int> lq_depths;
  std::string cover_set = "cantor";
  int cover_depth = 6;
  std::size_t hill_k = 0;              // 0 = n / 100
  int bootstrap = 200;
  double beta = 0.0;                   // 0 = alpha / 2
  int pairs = 20;

  std::string out = "out";
  bool plot = true;
  bool dump_ensemble = false;

  /// alpha = gamma^2/(2d) in duality mode.
  double effective_alpha() const;
  /// Canonical key=value echo of every field.
  ConfigMap echo() const;
};

/// Built-in defaults for a subcommand; the config file then overrides keys.
ExperimentConfig default_config(Subcommand s);

/// Types the map on top of the defaults. Unknown keys and unparsable values
/// raise ConfigError with one diagnostic per problem.
ExperimentConfig make_config(Subcommand s, const ConfigMap& map);

/// Empty iff every precondition of the operations the subcommand feeds holds.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

}  // namespace gmclab
