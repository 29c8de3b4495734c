#pragma once

// Statistical verification: moment-scaling regressions, tail indices, Laplace
// functionals, perfect scaling, covering-sum dimensions, KPZ root solvers and
// the dyadic L^q-spectrum proxy.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gmclab/atomic.hpp"
#include "gmclab/chaos.hpp"
#include "gmclab/stats.hpp"

namespace gmclab {

// ---------------------------------------------------------------- spectrum

/// masses[l][r] holds the box masses of radius lambdas[l] in replica r.
struct BoxMassSamples {
  std::vector<double> lambdas;
  std::vector<std::vector<std::vector<double>>> masses;

  std::size_t replicas() const { return masses.empty() ? 0 : masses.front().size(); }
};

struct SpectrumFit {
  std::vector<double> q_grid;
  std::vector<double> slopes;
  std::vector<double> stderr_;
  std::vector<double> intercepts;
  std::vector<double> r2;
  std::vector<double> curvature;  // residual quadratic term of the log-log fit
  std::vector<double> lambda_grid;
  std::vector<std::vector<double>> log_moments;  // [q][lambda]
};

/// OLS of log E[mass^q] against log lambda per q; stderr from a replica bootstrap.
SpectrumFit estimate_spectrum(const BoxMassSamples& samples, std::span<const double> q_grid,
                              int bootstrap, RngStream& rng);

// ---------------------------------------------------------------- tails

struct HillResult {
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t k = 0;
  bool stable = false;
  double drift = 0.0;  // relative change of the estimate across the k sweep
  std::vector<std::size_t> sweep_k;
  std::vector<double> sweep_estimate;
};

/// Threshold on the sweep drift above which no plateau is declared.
inline constexpr double kHillDriftTolerance = 0.25;
inline constexpr std::size_t kHillMinimumK = 30;

/// Hill estimate of the tail index from the top-k order statistics, with a
/// geometric k sweep over [max(30, n/1000), n/20] to judge plateau stability.
HillResult hill_tail_index(std::span<const double> samples, std::size_t k);

// ---------------------------------------------------------------- Laplace

struct LaplaceRow {
  double u = 0.0;
  double u2 = 0.0;  // second argument of the two-box variant
  double lhs = 0.0;
  double rhs = 0.0;
  stats::Interval lhs_ci;
  stats::Interval rhs_ci;
  stats::Interval diff_ci;
  bool overlap = false;
};

/// lhs = mean exp(-u Mbar(A)), rhs = mean exp(-Gamma(1-alpha)/alpha u^alpha M(A)),
/// each with an independent percentile bootstrap interval.
std::vector<LaplaceRow> verify_laplace(std::span<const double> mbar, std::span<const double> m,
                                       double alpha, std::span<const double> u_grid, int bootstrap,
                                       RngStream& rng);

/// Two disjoint boxes: exp(-u1 Mbar(A1) - u2 Mbar(A2)) against
/// exp(-c (u1^alpha M(A1) + u2^alpha M(A2))).
std::vector<LaplaceRow> verify_laplace_joint(std::span<const std::array<double, 2>> mbar,
                                             std::span<const std::array<double, 2>> m, double alpha,
                                             std::span<const std::array<double, 2>> u_grid,
                                             int bootstrap, RngStream& rng);

// ---------------------------------------------------------------- scaling

struct ScalingRow {
  double lambda = 1.0;
  double q = 0.0;
  double ratio = 1.0;
  stats::Interval ci;
  double theory = 1.0;
  bool pass = true;
};

struct ScalingCheckResult {
  std::vector<double> lambda_grid;
  std::vector<ScalingRow> rows;
  std::vector<double> ks_statistic;   // per lambda, Mbar(lambda A) vs rescaled Mbar(A)
  std::vector<double> ks_critical;    // 1% level
  std::vector<double> slopes;         // per q, fit of log ratio against log lambda
};

/// base: samples of Mbar(A); scaled[l]: samples of Mbar(lambda_l A). Omega_lambda
/// is drawn Gaussian with mean gamma^2/2 ln lambda and variance gamma^2 ln(1/lambda).
ScalingCheckResult verify_perfect_scaling(std::span<const double> base,
                                          const std::vector<std::vector<double>>& scaled,
                                          std::span<const double> lambdas, double gamma2, double alpha,
                                          int d, std::span<const double> q_grid, int bootstrap,
                                          RngStream& rng);

struct MgfCheck {
  double empirical = 0.0;
  double theory = 0.0;
  double se = 0.0;
  bool pass = false;
};

/// Empirical E[exp(q Omega_lambda)] against lambda^(gamma^2/2 q - gamma^2/2 q^2), 3 SE.
MgfCheck omega_mgf_self_test(double gamma2, double lambda, double q, std::size_t samples, RngStream& rng);

// ---------------------------------------------------------------- covering sums

/// Self-similar set: keep the listed base-adic digit cells at every depth.
struct SelfSimilarSet {
  std::string name;
  int d = 1;
  int base = 3;
  std::vector<std::array<int, 2>> digits;

  static SelfSimilarSet cantor_triadic();
  static SelfSimilarSet full(int d, int base);
  /// Keeps three of the four dyadic sub-squares.
  static SelfSimilarSet sierpinski_dyadic();
  static SelfSimilarSet by_name(const std::string& name);

  /// Lebesgue dimension normalized by d: ln(#digits) / (d ln base).
  double dimension() const;
  std::vector<Box> cover(int depth) const;
};

struct CoveringSumTable {
  std::string set_name;
  std::vector<double> s_grid;
  std::vector<int> levels;
  std::vector<std::vector<double>> sums;  // [level][s]
};

CoveringSumTable covering_sums(const LatticeMeasure& m, const SelfSimilarSet& set,
                               std::span<const int> levels, std::span<const double> s_grid);
CoveringSumTable covering_sums(const AtomicMeasure& m, const SelfSimilarSet& set,
                               std::span<const int> levels, std::span<const double> s_grid);
CoveringSumTable covering_sums_lebesgue(const SelfSimilarSet& set, std::span<const int> levels,
                                        std::span<const double> s_grid);

struct DimensionEstimate {
  double s_star = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::vector<double> slopes;  // slope of log mean S_n(s) against n, per s
};

/// Zero crossing in s of the level slope of log S_n(s), by linear interpolation
/// between bracketing grid values, with a replica bootstrap interval.
DimensionEstimate dimension_estimate(std::span<const CoveringSumTable> replicas, int bootstrap,
                                     RngStream& rng);

// ---------------------------------------------------------------- KPZ

/// Root in [0, 1] of xi(x) / d = dim_leb.
double kpz_solve(double dim_leb, double gamma2, int d);
/// Root in [0, alpha] of xi_bar(x) / d = dim_leb with alpha = gamma^2 / (2d).
double kpz_solve_dual(double dim_leb, double gamma2, int d);

// ---------------------------------------------------------------- L^q spectrum

inline constexpr const char* kConjectureLabel = "CONJECTURE-COMPARISON";

struct LqResult {
  SpectrumFit fit;               // slopes are the tau-hat(q)
  std::vector<double> reference; // xi(q) - d for M, conjectured piecewise form for Mbar
  std::string label = kConjectureLabel;
};

/// Negative switch point of the conjectured tau for Mbar, found numerically
/// from xi_bar'(q) q - xi_bar(q) = -d.
double lq_lower_switch(double gamma2, double alpha, int d);
double conjectured_tau_atomic(double gamma2, double alpha, int d, double q);

/// Dyadic box-counting proxy: slope of log sum_B mu(B)^q against log 2^-j over
/// nonempty dyadic boxes. Depths must divide the lattice resolution.
LqResult lq_spectrum(const LatticeMeasure& m, std::span<const double> q_grid,
                     std::span<const int> depths);
LqResult lq_spectrum(const AtomicMeasure& m, std::span<const double> q_grid,
                     std::span<const int> depths);

}  // namespace gmclab
