#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "gmclab/config.hpp"
#include "gmclab/experiments.hpp"
#include "gmclab/io.hpp"

using namespace gmclab;

namespace {

std::vector<std::string> diagnostics_of(Subcommand s, const ConfigMap& map) {
  return validate_config(make_config(s, map));
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gmclab_unit_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parser") {
  const auto m = parse_config_text("# header\ngamma2 = 0.5   # inline\n\n  level=8\nlambda = 0.5, 0.25\n");
  CHECK(m.size() == 3);
  CHECK(m.at("gamma2") == "0.5");
  CHECK(m.at("level") == "8");
  CHECK(m.at("lambda") == "0.5, 0.25");
  CHECK_THROWS_AS(parse_config_text("gamma2 = 1\ngamma2 = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);
  try {
    parse_config_text("a = 1\nbroken\n");
  } catch (const ConfigError& e) {
    CHECK(any_contains(e.diagnostics(), "line 2"));
  }
  CHECK_THROWS_AS(load_config_file("/nonexistent/gmclab.cfg"), ConfigError);
}

TEST_CASE("typed config") {
  const auto cfg = make_config(Subcommand::kChaos, {{"gamma2", "0.75"}, {"lambda", "1, 0.5"}, {"kernel.family", "star"}});
  CHECK(cfg.gamma2 == 0.75);
  CHECK(cfg.lambdas == std::vector<double>{1.0, 0.5});
  CHECK(cfg.kernel.family == KernelFamily::kStarScale);
  CHECK_THROWS_AS(make_config(Subcommand::kChaos, {{"gamma", "1"}}), ConfigError);
  CHECK_THROWS_AS(make_config(Subcommand::kChaos, {{"level", "six"}}), ConfigError);
  CHECK(parse_subcommand("duality") == Subcommand::kDuality);
  CHECK_THROWS(parse_subcommand("nope"));
  CHECK(subcommand_names().size() == 10);
  const auto echo = cfg.echo();
  CHECK(make_config(Subcommand::kChaos, echo).echo() == echo);
}

TEST_CASE("validation diagnostics") {
  for (const auto& name : subcommand_names()) {
    const auto s = parse_subcommand(name);
    CHECK_MESSAGE(validate_config(default_config(s)).empty(), name);
  }
  CHECK(any_contains(diagnostics_of(Subcommand::kDuality, {{"gamma2", "2"}}), "alpha out of (0,1)"));
  CHECK(any_contains(diagnostics_of(Subcommand::kScaling, {{"gamma2", "1"}, {"q", "0.6"}}),
                     "exceeds the moment threshold alpha=0.5"));
  CHECK(any_contains(diagnostics_of(Subcommand::kKpz, {{"grid.N", "1000"}}), "not a multiple of 3^"));
  CHECK(any_contains(diagnostics_of(Subcommand::kSpectrum, {{"q", "5"}}), "q="));
  CHECK_FALSE(diagnostics_of(Subcommand::kSpectrum, {{"lambda", "0.25, 0.125"}}).empty());
  CHECK_FALSE(diagnostics_of(Subcommand::kField, {{"grid.backend", "dense"}, {"grid.N", "8192"}}).empty());
  CHECK_FALSE(diagnostics_of(Subcommand::kChaos, {{"replicas", "0"}}).empty());
  auto bad = default_config(Subcommand::kDuality);
  bad.gamma2 = 2.0;
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);
}

}  // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  for (double v : {1.0 / 3.0, 2.718281828459045, 1e-300, 6.02214076e23, -0.125, 5e-324}) {
    const auto s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("csv writer") {
  CsvWriter w({"a", "b"});
  w.row({1, 0.5});
  w.row({"x", true});
  CHECK(w.text() == "a,b\n1,0.5\nx,true\n");
  CHECK(w.rows() == 2);
  CHECK_THROWS_AS(w.row({1}), std::invalid_argument);
}

TEST_CASE("digests and output inventory") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto root = scratch("outdir");
  OutputDir dir(root);
  dir.write("t.csv", "abc");
  REQUIRE(dir.files().size() == 1);
  CHECK(dir.files()[0].bytes == 3);
  CHECK(dir.files()[0].sha256 == sha256_file(root / "t.csv"));
  const auto svg = svg_plot("t", "x", "y", {{"s", {0, 1}, {1, 2}, true}});
  CHECK(svg.find("<svg") == 0);
  std::filesystem::remove_all(root);
}

TEST_CASE("reruns are byte-identical") {
  auto cfg = default_config(Subcommand::kChaos);
  cfg.replicas = 50;
  cfg.grid = 128;
  cfg.out = scratch("rerun_a").string();
  const auto a = run_experiment(cfg);
  cfg.out = scratch("rerun_b").string();
  const auto b = run_experiment(cfg);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    if (a.files[i].name == "manifest.json") continue;
    CHECK(a.files[i].sha256 == b.files[i].sha256);
  }
  std::filesystem::remove_all(a.out);
  std::filesystem::remove_all(b.out);
}

}  // TEST_SUITE
