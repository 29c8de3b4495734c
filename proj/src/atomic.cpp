#include "gmclab/atomic.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gmclab {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

// ---------------------------------------------------------------- truncation

Truncation Truncation::at(double z_min) {
  if (!(z_min > 0.0)) throw std::invalid_argument("z_min must be positive");
  return Truncation{std::log(z_min)};
}

Truncation Truncation::expected_count(double count, double volume, double alpha) {
  check_alpha(alpha);
  if (!(count > 0.0) || !(volume > 0.0)) throw std::invalid_argument("count and volume must be positive");
  // volume * z^-alpha / alpha = count
  return Truncation{-std::log(count * alpha / volume) / alpha};
}

Truncation Truncation::relative(double volume, double alpha, double weight_mean, double ratio) {
  check_alpha(alpha);
  if (!(volume > 0.0) || !(weight_mean > 0.0) || !(ratio > 0.0)) {
    throw std::invalid_argument("truncation rule needs positive volume, weight and ratio");
  }
  const double log_scale = std::log(volume * std::tgamma(1.0 - alpha) / alpha) / alpha;
  const double log_target = std::log(ratio) + log_scale + std::log1p(-alpha) - std::log(weight_mean);
  return Truncation{log_target / (1.0 - alpha)};
}

double Truncation::z_min() const { return std::exp(log_z_min); }

double StableAtoms::size_of(std::size_t i) const { return std::exp(log_sizes[i]); }

double StableAtoms::truncation_bound() const {
  return region.volume() * std::exp((1.0 - alpha) * log_z_min) / (1.0 - alpha);
}

std::string to_string(Construction c) {
  return c == Construction::kDirect ? "direct" : "subordinated";
}

double AtomicMeasure::total() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

double AtomicMeasure::measure_box(const Box& box) const {
  if (box.d != d) throw std::invalid_argument("box dimension does not match the measure");
  double s = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (box.contains(positions[i])) s += masses[i];
  }
  return s;
}

DualExponents alpha_from_gamma(double gamma2, int d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (!(gamma2 > 0.0)) throw std::invalid_argument("gamma2 must be positive");
  if (gamma2 >= 2.0 * d) throw std::invalid_argument("alpha out of (0,1): gamma2 must be < 2d");
  const double alpha = gamma2 / (2.0 * d);
  return {alpha, std::sqrt(gamma2) / alpha};
}

// ---------------------------------------------------------------- sampling

StableAtoms sample_stable_atoms(const Box& region, double alpha, Truncation truncation, RngStream& rng) {
  check_alpha(alpha);
  StableAtoms atoms;
  atoms.d = region.d;
  atoms.region = region;
  atoms.alpha = alpha;
  atoms.log_z_min = truncation.log_z_min;
  const double volume = region.volume();
  if (volume <= 0.0) return atoms;
  const double mean = volume * std::exp(-alpha * truncation.log_z_min) / alpha;
  const std::uint64_t count = rng.poisson(mean);
  atoms.positions.reserve(count);
  atoms.log_sizes.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Point p{0.0, 0.0};
    for (int a = 0; a < region.d; ++a) {
      p[a] = region.lo[a] + (region.hi[a] - region.lo[a]) * rng.uniform();
    }
    atoms.positions.push_back(p);
    atoms.log_sizes.push_back(truncation.log_z_min - std::log(rng.uniform()) / alpha);
  }
  return atoms;
}

StableAtoms sample_stable_atoms(std::span<const Box> regions, double alpha, Truncation truncation,
                                RngStream& rng) {
  if (regions.empty()) throw std::invalid_argument("no regions given");
  StableAtoms all = sample_stable_atoms(regions.front(), alpha, truncation, rng);
  for (std::size_t r = 1; r < regions.size(); ++r) {
    StableAtoms part = sample_stable_atoms(regions[r], alpha, truncation, rng);
    all.positions.insert(all.positions.end(), part.positions.begin(), part.positions.end());
    all.log_sizes.insert(all.log_sizes.end(), part.log_sizes.begin(), part.log_sizes.end());
    for (int a = 0; a < all.d; ++a) {
      all.region.lo[a] = std::min(all.region.lo[a], regions[r].lo[a]);
      all.region.hi[a] = std::max(all.region.hi[a], regions[r].hi[a]);
    }
  }
  return all;
}

AtomicMeasure build_atomic_direct(const FieldGrid& field, double gamma2, double alpha,
                                  const StableAtoms& atoms) {
  check_alpha(alpha);
  if (!(gamma2 > 0.0)) throw std::invalid_argument("gamma2 must be positive");
  if (std::abs(atoms.alpha - alpha) > 1e-12 * alpha) {
    throw std::invalid_argument("atoms were sampled with a different alpha");
  }
  if (atoms.d != field.lattice.d) throw std::invalid_argument("atom and field dimensions differ");
  const Box domain = field.lattice.domain();
  const double gamma = std::sqrt(gamma2);
  const double tilt = gamma / alpha;
  const double renorm = 0.5 * gamma2 / alpha;
  AtomicMeasure out;
  out.d = atoms.d;
  out.meta = {gamma2, alpha, field.level, Construction::kDirect, atoms.log_z_min, {}};
  out.positions = atoms.positions;
  out.masses.resize(atoms.size());
  out.log_masses.resize(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!domain.contains(atoms.positions[i])) throw std::invalid_argument("atom outside the lattice");
    const std::size_t cell = field.lattice.cell_of(atoms.positions[i]);
    const double lw = atoms.log_sizes[i] + tilt * field.values[cell] - renorm * field.variance_at(cell);
    out.log_masses[i] = lw;
    out.masses[i] = std::exp(lw);
  }
  return out;
}

AtomicMeasure build_subordinated(const LatticeMeasure& m, double alpha, Truncation truncation,
                                 RngStream& rng) {
  check_alpha(alpha);
  const Lattice& lat = m.lattice;
  std::vector<double> cumulative(m.masses.size());
  double running = 0.0;
  for (std::size_t i = 0; i < m.masses.size(); ++i) {
    if (!(m.masses[i] >= 0.0) || !std::isfinite(m.masses[i])) {
      throw std::invalid_argument("chaos masses must be finite and nonnegative");
    }
    running += m.masses[i];
    cumulative[i] = running;
  }
  AtomicMeasure out;
  out.d = lat.d;
  out.meta = {m.meta.gamma2, alpha, m.meta.level, Construction::kSubordinated, truncation.log_z_min, {}};
  if (running <= 0.0) return out;
  const double mean = running * std::exp(-alpha * truncation.log_z_min) / alpha;
  const std::uint64_t count = rng.poisson(mean);
  const double h = lat.spacing();
  const auto per = static_cast<std::size_t>(lat.n);
  out.positions.reserve(count);
  out.masses.reserve(count);
  out.log_masses.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const double target = rng.uniform() * running;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    auto cell = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cumulative.begin(), static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
    Point p{lat.origin + (static_cast<double>(cell % per) + rng.uniform()) * h, 0.5};
    if (lat.d == 2) p[1] = lat.origin + (static_cast<double>(cell / per) + rng.uniform()) * h;
    const double lz = truncation.log_z_min - std::log(rng.uniform()) / alpha;
    out.positions.push_back(p);
    out.log_masses.push_back(lz);
    out.masses.push_back(std::exp(lz));
  }
  return out;
}

// ---------------------------------------------------------------- closed forms

double xi_bar(double gamma2, double alpha, int d, double q) {
  check_alpha(alpha);
  return xi(gamma2, d, q / alpha);
}

double moment_relation_constant(double beta, double alpha) {
  check_alpha(alpha);
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  if (beta >= alpha) throw std::domain_error("moments of order beta >= alpha are infinite");
  const double r = beta / alpha;
  return std::tgamma(1.0 - r) * std::pow(std::tgamma(1.0 - alpha), r) /
         (std::tgamma(1.0 - beta) * std::pow(alpha, r));
}

double fractional_moment_identity_check(double x, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (x < 0.0) throw std::invalid_argument("x must be nonnegative");
  if (x == 0.0) return 0.0;
  // (1 - e^{-xz}) / z is finite at 0, so the integrand is only z^{-beta} singular.
  auto integrand = [x, beta](double z) { return (-std::expm1(-x * z) / z) * std::pow(z, -beta); };
  double err_head = 0.0;
  double err_tail = 0.0;
  boost::math::quadrature::tanh_sinh<double> head_rule;
  boost::math::quadrature::exp_sinh<double> tail_rule;
  const double head = head_rule.integrate(integrand, 0.0, 1.0, 1e-13, &err_head);
  const double tail = tail_rule.integrate(integrand, 1.0, std::numeric_limits<double>::infinity(),
                                          1e-13, &err_tail);
  if (!std::isfinite(head + tail)) throw QuadratureError("fractional-moment quadrature failed");
  const double rhs = beta / std::tgamma(1.0 - beta) * (head + tail);
  return std::abs(std::pow(x, beta) - rhs);
}

}  // namespace gmclab
