#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gmclab/field.hpp"
#include "gmclab/parallel.hpp"
#include "gmclab/stats.hpp"

using namespace gmclab;
using doctest::Approx;

namespace {

// empirical E[X_i X_j] with its standard error
std::pair<double, double> covariance(FieldSynthesizer& s, int n, std::size_t i, std::size_t j, int reps,
                                     bool layered = false) {
  std::vector<double> prod;
  for (int r = 0; r < reps; ++r) {
    const auto f = layered ? s.layered_field(n, 11, r, false) : s.field(n, 11, r);
    prod.push_back(f.values[i] * f.values[j]);
  }
  return {stats::mean(prod), stats::standard_error(prod)};
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("lattice geometry") {
  const Lattice l(2, 4, 0.0, 2.0);
  CHECK(l.spacing() == 0.5);
  CHECK(l.site_count() == 16);
  CHECK(l.site(5)[0] == 0.75);
  CHECK(l.site(5)[1] == 0.75);
  CHECK(l.cell_of(Point{0.74, 1.9}) == 13);
  CHECK_THROWS_AS(Lattice(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(Lattice(1, 1), std::invalid_argument);
}

TEST_CASE("circulant sampler reproduces the kernel covariance") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 128));
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{5, 5}, {10, 13}, {0, 64}, {3, 120}}) {
    const auto [emp, se] = covariance(s, 6, i, j, 4000);
    const auto& lat = s.lattice();
    CHECK(std::abs(emp - eval_partial_kernel(s.spec(), 6, lat.site(i), lat.site(j))) <= 4.0 * se);
  }
}

TEST_CASE("layered and one-shot fields share the covariance") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 64));
  const auto [a, sa] = covariance(s, 5, 7, 9, 4000, true);
  const auto [b, sb] = covariance(s, 5, 7, 9, 4000, false);
  CHECK(std::abs(a - b) <= 4.0 * std::hypot(sa, sb));
}

TEST_CASE("dense backend for the gff square") {
  FieldSynthesizer s(KernelSpec::gff_square(), Lattice(2, 12));
  const auto& lat = s.lattice();
  const auto [emp, se] = covariance(s, 3, 40, 41, 3000);
  CHECK(std::abs(emp - eval_partial_kernel(s.spec(), 3, lat.site(40), lat.site(41))) <= 4.0 * se);
  const auto f = s.field(3, 1, 0);
  CHECK(f.site_variance.size() == lat.site_count());
  CHECK(f.variance_at(40) == Approx(eval_partial_kernel(s.spec(), 3, lat.site(40), lat.site(40))));
  CHECK_THROWS_AS(make_sampler(KernelSpec::gff_square(), 2, CovarianceKind::kPartial, lat, SamplerBackend::kCirculant),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_sampler(KernelSpec::gff_square(), 2, CovarianceKind::kPartial, Lattice(2, 65)),
                  std::invalid_argument);
}

TEST_CASE("circulant embedding in 2d stays within the clipping tolerance") {
  const Lattice lat(2, 32);
  const CirculantSampler c(lat, [](double r) { return partial_kernel_radial(KernelSpec::exact2d(), 16, r); });
  CHECK(c.clipped_fraction() <= CirculantSampler::kClipTolerance);
  CHECK(c.torus_size() >= 64);
}

TEST_CASE("streams are deterministic and independent of the worker count") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 256));
  const auto a = s.field(6, 42, 3);
  const auto b = s.field(6, 42, 3);
  CHECK(a.values == b.values);
  CHECK(s.field(6, 42, 4).values != a.values);
  CHECK(s.field(6, 42, 3, StreamPurpose::kReferenceField).values != a.values);
  std::vector<std::vector<double>> par(16);
  parallel_for(16, [&](std::size_t r) { par[r] = s.field(6, 42, r).values; });
  CHECK(par[3] == a.values);
}

TEST_CASE("ensemble dump round trip") {
  FieldSynthesizer s(KernelSpec::exact1d(), Lattice(1, 32));
  std::vector<std::vector<double>> reps{s.field(3, 9, 0).values, s.field(3, 9, 1).values};
  EnsembleHeader h;
  h.d = 1;
  h.n = 32;
  h.level = 3;
  h.seed = 9;
  h.replicas = 2;
  const auto path = (std::filesystem::temp_directory_path() / "gmclab_unit_ensemble.gmcf").string();
  write_ensemble(path, h, reps);
  EnsembleHeader back;
  const auto read = read_ensemble(path, &back);
  CHECK(read == reps);
  CHECK(back.seed == 9);
  CHECK(back.level == 3);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
