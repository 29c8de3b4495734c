// gmclab <subcommand> --config <path> [--seed N] [--out DIR] [--replicas N]
//
// Exit codes: 0 all checks passed, 1 a statistical check failed,
// 2 usage or configuration error.

#include <CLI11.hpp>

#include <iostream>

#include "gmclab/config.hpp"
#include "gmclab/experiments.hpp"

int main(int argc, char** argv) {
  using namespace gmclab;
  CLI::App app{"gmclab: Gaussian multiplicative chaos and atomic chaos experiments"};
  app.set_version_flag("--version", artifact_version());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> replicas;
  bool check_only = false;
  for (const auto& name : subcommand_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    sub->add_option("--config", config_path, "key=value config file")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--replicas", replicas, "replica count (overrides the config)");
    sub->add_flag("--check", check_only, "validate the config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Subcommand which = parse_subcommand(app.get_subcommands().front()->get_name());
  ExperimentConfig cfg;
  try {
    ConfigMap map = load_config_file(config_path);
    if (seed) map["seed"] = std::to_string(*seed);
    if (out) map["out"] = *out;
    if (replicas) map["replicas"] = std::to_string(*replicas);
    cfg = make_config(which, map);
    if (auto diags = validate_config(cfg); !diags.empty()) throw ConfigError(diags);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (check_only) {
    std::cout << "config ok\n";
    return 0;
  }

  try {
    const auto result = run_experiment(cfg);
    for (const auto& c : result.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    }
    std::cout << "wrote " << result.files.size() << " files to " << result.out.string() << " in "
              << result.wall_seconds << " s\n";
    return result.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
