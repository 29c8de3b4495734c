#pragma once

#include <string>
#include <vector>

#include "gmclab/field.hpp"

namespace gmclab {

struct ChaosMeta {
  double gamma2 = 0.0;
  int level = 0;
  std::string family;
  std::string seed_path;
  std::vector<std::string> warnings;
};

/// Approximating chaos M_n as nonnegative cell masses.
struct LatticeMeasure {
  Lattice lattice;
  std::vector<double> masses;
  ChaosMeta meta;

  double total() const;
};

/// Cell mass = h^d exp(gamma X(cell) - gamma^2/2 Var X(cell)). gamma2 >= 2d
/// only records a warning. Throws on gamma2 <= 0 or a non-finite field.
LatticeMeasure build_chaos(const FieldGrid& field, double gamma2);

/// Sum of the masses of the cells whose centers lie in the half-open box.
/// Throws std::domain_error when the box misses the lattice domain.
double measure_box(const LatticeMeasure& m, const Box& box);

/// xi(q) = (d + gamma^2/2) q - gamma^2/2 q^2.
double xi(double gamma2, int d, double q);

/// Moments E[M(A)^q] are finite for 0 <= q < 2d / gamma^2.
double chaos_moment_bound(double gamma2, int d);

}  // namespace gmclab
