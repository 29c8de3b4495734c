#pragma once

// Atomic (dual) chaos: the alpha-stable scattered measure n_alpha, the direct
// construction weighting its atoms by exp((gamma/alpha) X^n - gamma^2/(2 alpha) E[X^n^2]),
// and the construction subordinated to a realized chaos M.

#include <span>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/rng.hpp"

namespace gmclab {

/// Jumps below z_min are dropped. Stored in log form.
struct Truncation {
  double log_z_min = 0.0;

  static Truncation at(double z_min);
  /// z_min giving `count` expected atoms on a region of volume `volume`.
  static Truncation expected_count(double count, double volume, double alpha);
  /// Default rule: the conditional mean of the discarded mass,
  /// weight_mean * z_min^(1-alpha) / (1-alpha), is `ratio` times the typical
  /// sampled mass (volume Gamma(1-alpha)/alpha)^(1/alpha).
  static Truncation relative(double volume, double alpha, double weight_mean, double ratio = 1e-3);

  double z_min() const;
};

/// Poisson atoms of intensity dx dz / z^(1+alpha) on a region, z >= z_min.
struct StableAtoms {
  int d = 1;
  Box region;
  double alpha = 0.5;
  double log_z_min = 0.0;
  std::vector<Point> positions;
  std::vector<double> log_sizes;

  std::size_t size() const { return positions.size(); }
  double size_of(std::size_t i) const;
  /// Mean of the discarded jump mass, |region| z_min^(1-alpha) / (1-alpha).
  double truncation_bound() const;
};

enum class Construction { kDirect, kSubordinated };
std::string to_string(Construction c);

struct AtomicMeta {
  double gamma2 = 0.0;
  double alpha = 0.0;
  int level = 0;
  Construction construction = Construction::kDirect;
  double log_z_min = 0.0;
  std::string seed_path;
};

/// A finite sum of point masses.
struct AtomicMeasure {
  int d = 1;
  std::vector<Point> positions;
  std::vector<double> masses;
  std::vector<double> log_masses;
  AtomicMeta meta;

  std::size_t size() const { return positions.size(); }
  double total() const;
  /// Half-open box convention [lo, hi) for atoms on a boundary.
  double measure_box(const Box& box) const;
};

struct DualExponents {
  double alpha;
  double gamma_bar;
};

/// alpha = gamma^2 / (2d), gamma_bar = gamma / alpha. Throws unless 0 < gamma2 < 2d.
DualExponents alpha_from_gamma(double gamma2, int d);

StableAtoms sample_stable_atoms(const Box& region, double alpha, Truncation truncation, RngStream& rng);
inline StableAtoms sample_stable_atoms(const Box& region, double alpha, double z_min, RngStream& rng) {
  return sample_stable_atoms(region, alpha, Truncation::at(z_min), rng);
}
/// Independently scattered: one draw per region, concatenated.
StableAtoms sample_stable_atoms(std::span<const Box> regions, double alpha, Truncation truncation,
                                RngStream& rng);

AtomicMeasure build_atomic_direct(const FieldGrid& field, double gamma2, double alpha,
                                  const StableAtoms& atoms);

/// Conditionally on m, a Poisson measure of intensity M(dx) dz / z^(1+alpha):
/// the total count is Poisson(M_total z_min^-alpha / alpha) and each atom picks
/// its cell with probability proportional to the cell mass, which is the same
/// law as independent per-cell Poisson counts.
AtomicMeasure build_subordinated(const LatticeMeasure& m, double alpha, Truncation truncation,
                                 RngStream& rng);

/// xi_bar(q) = xi(q / alpha).
double xi_bar(double gamma2, double alpha, int d, double q);

/// Gamma(1 - b/a) Gamma(1 - a)^(b/a) / (Gamma(1 - b) a^(b/a)), 0 <= b < a.
double moment_relation_constant(double beta, double alpha);

/// |x^beta - beta/Gamma(1-beta) int_0^inf (1 - e^{-xz}) z^{-1-beta} dz|.
double fractional_moment_identity_check(double x, double beta);

}  // namespace gmclab
