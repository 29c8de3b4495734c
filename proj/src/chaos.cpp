#include "gmclab/chaos.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gmclab {

double LatticeMeasure::total() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

LatticeMeasure build_chaos(const FieldGrid& field, double gamma2) {
  if (!(gamma2 > 0.0) || !std::isfinite(gamma2)) {
    throw std::invalid_argument("gamma2 must be positive and finite");
  }
  LatticeMeasure m;
  m.lattice = field.lattice;
  m.meta.gamma2 = gamma2;
  m.meta.level = field.level;
  if (gamma2 >= 2.0 * field.lattice.d) {
    m.meta.warnings.push_back("gamma2 >= 2d: the limit measure is degenerate");
  }
  const double gamma = std::sqrt(gamma2);
  const double h = field.lattice.cell_volume();
  m.masses.resize(field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double x = field.values[i];
    if (!std::isfinite(x)) throw std::invalid_argument("field contains non-finite values");
    m.masses[i] = h * std::exp(gamma * x - 0.5 * gamma2 * field.variance_at(i));
  }
  return m;
}

double measure_box(const LatticeMeasure& m, const Box& box) {
  const Lattice& lat = m.lattice;
  if (box.d != lat.d) throw std::invalid_argument("box dimension does not match the lattice");
  if (!box.intersects(lat.domain())) throw std::domain_error("box does not meet the lattice domain");
  const double h = lat.spacing();
  auto range = [&](int axis, long& lo, long& hi) {
    lo = static_cast<long>(std::ceil((box.lo[axis] - lat.origin) / h - 0.5));
    hi = static_cast<long>(std::ceil((box.hi[axis] - lat.origin) / h - 0.5));
    lo = std::max(lo, 0L);
    hi = std::min(hi, static_cast<long>(lat.n));
  };
  long x0, x1;
  range(0, x0, x1);
  double sum = 0.0;
  if (lat.d == 1) {
    for (long i = x0; i < x1; ++i) sum += m.masses[static_cast<std::size_t>(i)];
    return sum;
  }
  long y0, y1;
  range(1, y0, y1);
  for (long j = y0; j < y1; ++j) {
    for (long i = x0; i < x1; ++i) {
      sum += m.masses[static_cast<std::size_t>(j * lat.n + i)];
    }
  }
  return sum;
}

double xi(double gamma2, int d, double q) { return (d + 0.5 * gamma2) * q - 0.5 * gamma2 * q * q; }

double chaos_moment_bound(double gamma2, int d) {
  return gamma2 > 0.0 ? 2.0 * d / gamma2 : std::numeric_limits<double>::infinity();
}

}  // namespace gmclab
