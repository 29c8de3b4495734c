#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gmclab/rng.hpp"

namespace gmclab::stats {

/// Summation in index order, so results do not depend on the worker count.
double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased
double standard_error(std::span<const double> xs);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  double slope_stderr = 0.0;
};
OlsFit ols(std::span<const double> x, std::span<const double> y);

/// Quadratic coefficient of a least-squares parabola, a curvature diagnostic.
double quadratic_coefficient(std::span<const double> x, std::span<const double> y);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Percentile bootstrap interval of the sample mean.
Interval bootstrap_mean_ci(std::span<const double> values, int resamples, RngStream& rng,
                           double level = 0.95);
/// Percentile interval of a set of bootstrap replicates.
Interval percentile_interval(std::vector<double> replicates, double level = 0.95);

double spearman(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov statistic and its asymptotic critical value.
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_critical(std::size_t n, std::size_t m, double significance);

/// Jarque-Bera statistic; asymptotically chi-square with 2 degrees of freedom.
double jarque_bera(std::span<const double> xs);
inline constexpr double kChiSquare2At1Percent = 9.2103;

}  // namespace gmclab::stats
