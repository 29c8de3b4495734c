#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gmclab/analysis.hpp"

using namespace gmclab;
using doctest::Approx;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

std::vector<double> pareto_quantiles(std::size_t n, double alpha, double scale = 1.0) {
  std::vector<double> v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back(scale * std::pow((i - 0.5) / n, -1.0 / alpha));
  return v;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("spectrum regression recovers exact power laws") {
  const std::vector<double> lambdas{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  RngStream rng(1, {0, 0, StreamPurpose::kBootstrap});
  for (double q : {0.5, 1.0, 1.5}) {
    BoxMassSamples s;
    s.lambdas = lambdas;
    for (double l : lambdas) {
      // every box carries (C lambda^xi)^(1/q), so the q-th moment is exactly C lambda^xi
      const double m = std::pow(1.7 * std::pow(l, xi(0.5, 1, q)), 1.0 / q);
      s.masses.push_back(std::vector<std::vector<double>>(3, std::vector<double>(4, m)));
    }
    const auto fit = estimate_spectrum(s, std::vector<double>{q}, 20, rng);
    CHECK(fit.slopes[0] == Approx(xi(0.5, 1, q)).epsilon(1e-9));
    CHECK(std::exp(fit.intercepts[0]) == Approx(1.7).epsilon(1e-9));
  }
  BoxMassSamples few;
  few.lambdas = {0.5, 0.25, 0.5};
  CHECK_THROWS_AS(estimate_spectrum(few, std::vector<double>{1.0}, 0, rng), std::invalid_argument);
}

TEST_CASE("hill estimator") {
  const auto x = pareto_quantiles(20000, 0.5);
  const auto h = hill_tail_index(x, 200);
  CHECK(h.estimate == Approx(0.5).epsilon(0.02));
  CHECK(h.stable);
  CHECK(h.ci_lo < 0.5);
  CHECK(h.ci_hi > 0.5);
  const auto scaled = hill_tail_index(pareto_quantiles(20000, 0.5, 37.5), 200);
  CHECK(std::abs(scaled.estimate - h.estimate) <= 1e-12 * h.estimate);
  std::vector<double> expo;
  for (std::size_t i = 1; i <= 20000; ++i) expo.push_back(-std::log((i - 0.5) / 20000));
  CHECK_FALSE(hill_tail_index(expo, 200).stable);
  CHECK_FALSE(hill_tail_index(x, 10).stable);
  CHECK_THROWS_AS(hill_tail_index(x, 20000), std::invalid_argument);
}

TEST_CASE("kpz roots") {
  CHECK(kpz_solve(kCantorDim, 0.5, 1) == Approx(0.569642264834269054).epsilon(1e-13));
  CHECK(kpz_solve(kCantorDim, 1.0, 1) == Approx(0.505947439590297556).epsilon(1e-13));
  CHECK(kpz_solve_dual(kCantorDim, 1.0, 1) == Approx(0.5 * 0.505947439590297556).epsilon(1e-13));
  CHECK(kpz_solve(0.0, 1.0, 1) == 0.0);
  CHECK(kpz_solve(1.0, 1.0, 1) == Approx(1.0).epsilon(1e-14));
  for (double g2 : {0.1, 0.5, 1.0, 1.9}) {
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      CHECK(std::abs(kpz_solve(xi(g2, 1, x), g2, 1) - x) <= 1e-12);
    }
  }
  for (double g2 : {0.3, 1.0, 3.0}) {
    const double alpha = g2 / 4.0;
    for (int i = 0; i < 100; ++i) {
      const double dl = i / 99.0;
      CHECK(std::abs(kpz_solve_dual(dl, g2, 2) - alpha * kpz_solve(dl, g2, 2)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(kpz_solve(1.2, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(kpz_solve(0.5, 2.0, 1), std::invalid_argument);
}

TEST_CASE("covering sums of Lebesgue measure on the Cantor set") {
  const auto set = SelfSimilarSet::cantor_triadic();
  CHECK(set.dimension() == Approx(kCantorDim));
  CHECK(set.cover(3).size() == 8);
  CHECK(set.cover(2)[1].lo[0] == Approx(2.0 / 9.0));
  std::vector<double> s_grid;
  for (int i = 0; i <= 20; ++i) s_grid.push_back(0.3 + 0.03 * i);
  const std::vector<int> levels{1, 2, 3, 4, 5, 6};
  const auto t = covering_sums_lebesgue(set, levels, s_grid);
  RngStream rng(1, {0, 0, StreamPurpose::kBootstrap});
  const auto est = dimension_estimate(std::span(&t, 1), 0, rng);
  CHECK(std::abs(est.s_star - kCantorDim) <= 0.01);

  FieldSynthesizer synth(KernelSpec::exact1d(), Lattice(1, 729));
  const auto flat = build_chaos(synth.field(3, 1, 0), 1e-40);
  const auto tm = covering_sums(flat, set, levels, s_grid);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    for (std::size_t i = 0; i < s_grid.size(); ++i) CHECK(tm.sums[l][i] == Approx(t.sums[l][i]).epsilon(1e-12));
  }
  const std::vector<double> narrow{0.9, 0.92, 0.94, 0.96, 0.98};
  const auto tn = covering_sums_lebesgue(set, levels, narrow);
  CHECK_THROWS_AS(dimension_estimate(std::span(&tn, 1), 0, rng), std::runtime_error);
}

TEST_CASE("atomic covering sums follow the cover") {
  AtomicMeasure m;
  m.d = 1;
  m.positions = {Point{0.1, 0.5}, Point{0.5, 0.5}, Point{2.0 / 3.0, 0.5}};
  m.masses = {1.0, 5.0, 2.0};
  m.log_masses = {0.0, std::log(5.0), std::log(2.0)};
  const std::vector<int> levels{1};
  const std::vector<double> s{1.0};
  const auto t = covering_sums(m, SelfSimilarSet::cantor_triadic(), levels, s);
  CHECK(t.sums[0][0] == 3.0);  // the atom at 1/2 is off the set, 2/3 sits on a closed left end
}

TEST_CASE("L^q proxy and the conjectured form") {
  FieldSynthesizer synth(KernelSpec::exact1d(), Lattice(1, 256));
  const auto flat = build_chaos(synth.field(4, 1, 0), 1e-40);
  const std::vector<double> q{0.0, 1.0, 2.0};
  const std::vector<int> depths{2, 4, 6};
  const auto r = lq_spectrum(flat, q, depths);
  CHECK(r.fit.slopes[0] == Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(r.fit.slopes[1]) <= 1e-12);
  CHECK(r.fit.slopes[2] == Approx(1.0).epsilon(1e-12));
  CHECK(r.label == std::string("CONJECTURE-COMPARISON"));
  const std::vector<int> bad{3, 9};
  CHECK_THROWS_AS(lq_spectrum(flat, q, bad), std::invalid_argument);

  const double alpha = 0.5;
  CHECK(lq_lower_switch(1.0, alpha, 1) == Approx(-alpha * std::sqrt(2.0)).epsilon(1e-10));
  CHECK(lq_lower_switch(1.0, 0.25, 2) == Approx(-0.25 * 2.0).epsilon(1e-10));
  CHECK(conjectured_tau_atomic(1.0, alpha, 1, alpha) == 0.0);
  CHECK(conjectured_tau_atomic(1.0, alpha, 1, 0.0) == Approx(-1.0));
  CHECK(conjectured_tau_atomic(1.0, alpha, 1, 0.3) == Approx(xi_bar(1.0, alpha, 1, 0.3) - 1.0));
  const double qm = lq_lower_switch(1.0, alpha, 1);
  CHECK(conjectured_tau_atomic(1.0, alpha, 1, qm - 1e-9) == Approx(conjectured_tau_atomic(1.0, alpha, 1, qm + 1e-9)).epsilon(1e-6));
}

TEST_CASE("laplace and scaling verifiers on identical laws") {
  RngStream rng(3, {0, 0, StreamPurpose::kBootstrap});
  std::vector<double> m(2000), mbar(2000);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 + i / 2000.0;
  const auto rows = verify_laplace(mbar, m, 0.5, std::vector<double>{0.0}, 50, rng);
  CHECK(rows[0].lhs == 1.0);
  CHECK(rows[0].rhs == 1.0);
  CHECK(rows[0].overlap);

  const std::vector<double> lambdas{1.0};
  const auto sc = verify_perfect_scaling(m, {m}, lambdas, 1.0, 0.5, 1, std::vector<double>{0.25}, 50, rng);
  CHECK(sc.rows[0].ratio == 1.0);
  CHECK(sc.rows[0].pass);
  CHECK(sc.ks_statistic[0] == 0.0);
  CHECK_THROWS_AS(verify_perfect_scaling(m, {m}, lambdas, 1.0, 0.5, 1, std::vector<double>{0.6}, 50, rng),
                  std::invalid_argument);
  const std::vector<double> too_big{1.5};
  CHECK_THROWS_AS(verify_perfect_scaling(m, {m}, too_big, 1.0, 0.5, 1, std::vector<double>{0.25}, 50, rng),
                  std::invalid_argument);
}

TEST_CASE("Omega moment generating function") {
  RngStream rng(8, {0, 0, StreamPurpose::kOmega});
  for (double lambda : {0.5, 0.125}) {
    const auto m = omega_mgf_self_test(1.0, lambda, 0.5, 50000, rng);
    CHECK(m.pass);
    CHECK(m.theory == Approx(std::pow(lambda, 0.25 - 0.125)));
  }
  CHECK(omega_mgf_self_test(1.0, 1.0, 2.0, 10, rng).empirical == 1.0);
}

}  // TEST_SUITE

TEST_SUITE("stats") {

TEST_CASE("basic estimators") {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{3, 5, 7, 9, 11};
  const auto f = stats::ols(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r2 == Approx(1.0));
  CHECK(stats::variance(x) == Approx(2.5));
  const std::vector<double> cubes{1, 8, 27, 64, 125};
  CHECK(stats::spearman(x, cubes) == Approx(1.0));
  CHECK(stats::ks_statistic(x, x) == 0.0);
  CHECK(stats::ks_statistic({1, 2}, {3, 4}) == 1.0);
  CHECK(stats::ks_critical(1000, 1000, 0.01) == Approx(1.6276 * std::sqrt(2.0 / 1000)).epsilon(1e-3));
  std::vector<double> quad{1, 4, 9, 16, 25};
  CHECK(stats::quadratic_coefficient(x, quad) == Approx(1.0));
  RngStream rng(1, {0, 0, StreamPurpose::kBootstrap});
  const auto ci = stats::bootstrap_mean_ci(x, 400, rng);
  CHECK(ci.contains(3.0));
}

}  // TEST_SUITE
