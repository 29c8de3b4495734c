#pragma once

// Shared state of one pipeline run; internal to the experiments sources.


#include <string>
#include <vector>

#include "gmclab/atomic.hpp"
#include "gmclab/experiments.hpp"
#include "gmclab/field.hpp"

namespace gmclab::detail {

struct Run {
  const ExperimentConfig& cfg;
  OutputDir dir;
  std::vector<Check> checks;
  std::vector<std::string> streams;  // "level=6/field" style suffixes used per replica
  std::vector<std::pair<std::string, std::string>> notes;

  void check(std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }
  void stream(int level, StreamPurpose p) {
    const std::string s = "level=" + std::to_string(level) + "/" + to_string(p);
    for (const auto& e : streams) {
      if (e == s) return;
    }
    streams.push_back(s);
  }
  void note(std::string key, std::string value) { notes.emplace_back(std::move(key), std::move(value)); }
  void plot(const std::string& name, const std::string& svg) {
    if (cfg.plot) dir.write(name, svg);
  }
};

inline Lattice unit_lattice(const ExperimentConfig& c) { return Lattice(c.d, c.grid, 0.0, 1.0); }

/// Explicit z_min, else expected atom count, else the relative rule.
Truncation choose_truncation(const ExperimentConfig& c, double volume, double alpha);

/// Boxes of side lambda tiling the unit domain (lambda = 1 gives the domain).
std::vector<Box> tiling_boxes(int d, double lambda);

void run_field(Run& run);
void run_chaos(Run& run);
void run_atoms(Run& run);
void run_spectrum(Run& run);
void run_laplace(Run& run);
void run_tail(Run& run);
void run_scaling(Run& run);
void run_kpz(Run& run);
void run_duality(Run& run);
void run_lq(Run& run);

}  // namespace gmclab::detail
