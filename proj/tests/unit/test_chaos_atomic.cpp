#include <doctest.h>

#include <cmath>

#include "gmclab/atomic.hpp"
#include "gmclab/chaos.hpp"
#include "gmclab/stats.hpp"

using namespace gmclab;
using doctest::Approx;

TEST_SUITE("chaos") {

TEST_CASE("power-law spectrum") {
  CHECK(xi(0.7, 1, 1.0) == Approx(1.0));
  CHECK(xi(0.7, 2, 1.0) == Approx(2.0));
  CHECK(xi(0.7, 2, 0.0) == 0.0);
  CHECK(xi(0.5, 1, 2.0) == Approx(1.5));
  CHECK(chaos_moment_bound(1.0, 1) == 2.0);
}

TEST_CASE("vanishing coupling gives Lebesgue measure") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 1024));
  for (int r = 0; r < 5; ++r) {
    const auto m = build_chaos(s.field(6, 3, r), 1e-40);
    CHECK(m.total() == 1.0);
    CHECK(measure_box(m, Box::interval(0.25, 0.5)) == 0.25);
  }
}

TEST_CASE("mean total mass is the volume") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 256));
  std::vector<double> totals;
  for (int r = 0; r < 3000; ++r) totals.push_back(build_chaos(s.field(5, 8, r), 0.5).total());
  CHECK(std::abs(stats::mean(totals) - 1.0) <= 3.0 * stats::standard_error(totals));
}

TEST_CASE("supercritical coupling is a warning") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 64));
  const auto m = build_chaos(s.field(3, 1, 0), 2.5);
  CHECK(m.meta.warnings.size() == 1);
  CHECK_THROWS_AS(build_chaos(s.field(3, 1, 0), 0.0), std::invalid_argument);
}

TEST_CASE("box masses use half-open cells") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 8));
  const auto m = build_chaos(s.field(2, 1, 0), 0.5);
  CHECK(measure_box(m, Box::interval(0.0, 0.5)) + measure_box(m, Box::interval(0.5, 1.0)) ==
        Approx(m.total()).epsilon(1e-15));
  CHECK(measure_box(m, Box::interval(0.0, 0.0625)) == 0.0);
  CHECK(measure_box(m, Box::interval(0.0, 0.0626)) == m.masses[0]);
  CHECK_THROWS_AS(measure_box(m, Box::interval(2.0, 3.0)), std::domain_error);
}

}  // TEST_SUITE

TEST_SUITE("atomic") {

TEST_CASE("duality exponents") {
  const auto e = alpha_from_gamma(1.0, 1);
  CHECK(e.alpha == 0.5);
  CHECK(e.gamma_bar == Approx(2.0));
  CHECK(std::sqrt(1.0) * e.gamma_bar == Approx(2.0 * 1));
  CHECK(alpha_from_gamma(1.0, 2).alpha == 0.25);
  CHECK_THROWS_WITH_AS(alpha_from_gamma(2.0, 1), doctest::Contains("alpha out of (0,1)"), std::invalid_argument);
  CHECK(xi_bar(1.0, 0.5, 1, 0.5) == Approx(1.0));
  CHECK(xi_bar(1.0, 0.5, 1, 0.25) == Approx(xi(1.0, 1, 0.5)));
}

TEST_CASE("moment relation constant") {
  CHECK(moment_relation_constant(0.25, 0.5) == Approx(2.723288216330671026).epsilon(1e-13));
  CHECK(moment_relation_constant(0.0, 0.3) == Approx(1.0));
  CHECK_THROWS_AS(moment_relation_constant(0.6, 0.5), std::domain_error);
}

TEST_CASE("fractional moment identity") {
  for (double beta : {0.1, 0.25, 0.5, 0.8}) {
    for (double x : {0.01, 0.5, 1.0, 7.0, 300.0}) CHECK(fractional_moment_identity_check(x, beta) < 1e-8);
  }
}

TEST_CASE("truncation rules") {
  const auto t = Truncation::expected_count(500.0, 2.0, 0.5);
  CHECK(2.0 * std::pow(t.z_min(), -0.5) / 0.5 == Approx(500.0));
  const double alpha = 0.4, ratio = 1e-3;
  const auto r = Truncation::relative(1.0, alpha, 1.0, ratio);
  const double discarded = std::exp((1 - alpha) * r.log_z_min) / (1 - alpha);
  const double typical = std::pow(std::tgamma(1 - alpha) / alpha, 1 / alpha);
  CHECK(discarded / typical == Approx(ratio).epsilon(1e-10));
}

TEST_CASE("stable atoms respect the threshold and the Pareto law") {
  RngStream rng(5, {0, 0, StreamPurpose::kAtoms});
  const Box region = Box::interval(0.0, 2.0);
  const auto atoms = sample_stable_atoms(region, 0.5, 1e-4, rng);
  const double mean = 2.0 * std::pow(1e-4, -0.5) / 0.5;
  CHECK(std::abs(static_cast<double>(atoms.size()) - mean) <= 4.0 * std::sqrt(mean));
  std::size_t above = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    CHECK(atoms.log_sizes[i] >= atoms.log_z_min);
    CHECK(region.contains(atoms.positions[i]));
    above += atoms.size_of(i) > 4e-4;
  }
  const double p = 0.5;  // P(z > 4 z_min) = 4^-alpha
  const double n = static_cast<double>(atoms.size());
  CHECK(std::abs(above / n - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("direct construction weights each atom by the field") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 64));
  const auto f = s.field(4, 2, 0);
  RngStream rng(2, {0, 4, StreamPurpose::kAtoms});
  const auto atoms = sample_stable_atoms(Box::unit(1), 0.5, 1e-3, rng);
  const auto m = build_atomic_direct(f, 1.0, 0.5, atoms);
  REQUIRE(m.size() == atoms.size());
  for (std::size_t i = 0; i < m.size(); i += 17) {
    const auto c = f.lattice.cell_of(atoms.positions[i]);
    CHECK(m.log_masses[i] == Approx(atoms.log_sizes[i] + 2.0 * f.values[c] - 1.0 * f.variance0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(build_atomic_direct(f, 1.0, 0.25, atoms), std::invalid_argument);
}

TEST_CASE("subordinated Laplace transform given the chaos") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 16));
  const auto m = build_chaos(s.field(3, 4, 0), 1.0);
  const double alpha = 0.5, u = 1.0;
  const auto trunc = Truncation::at(1e-7);
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 4000; ++r) {
    RngStream rng(4, {r, 3, StreamPurpose::kSubordination});
    v.push_back(std::exp(-u * build_subordinated(m, alpha, trunc, rng).total()));
  }
  const double theory = std::exp(-std::tgamma(1 - alpha) / alpha * std::pow(u, alpha) * m.total());
  CHECK(std::abs(stats::mean(v) - theory) <= 3.0 * stats::standard_error(v) + u * m.total() * std::sqrt(1e-7) / (1 - alpha));
}

}  // TEST_SUITE
