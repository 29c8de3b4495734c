#include "gmclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gmclab::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double standard_error(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

OlsFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols needs distinct abscissae");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

double quadratic_coefficient(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 3) return 0.0;
  // normal equations for y = a + b x + c x^2, solved by Cramer's rule
  double s[5] = {0, 0, 0, 0, 0};
  double t[3] = {0, 0, 0};
  const double mx = mean(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - mx;
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) t[k] += p * y[i];
      p *= u;
    }
  }
  auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h,
                 double i) { return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g); };
  const double det = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
  if (std::abs(det) < 1e-300) return 0.0;
  return det3(s[0], s[1], t[0], s[1], s[2], t[1], s[2], s[3], t[2]) / det;
}

Interval percentile_interval(std::vector<double> replicates, double level) {
  if (replicates.empty()) throw std::invalid_argument("no bootstrap replicates");
  std::sort(replicates.begin(), replicates.end());
  const double tail = 0.5 * (1.0 - level);
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(replicates.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, replicates.size() - 1);
    return replicates[i] + (pos - static_cast<double>(i)) * (replicates[j] - replicates[i]);
  };
  return {at(tail), at(1.0 - tail)};
}

Interval bootstrap_mean_ci(std::span<const double> values, int resamples, RngStream& rng,
                           double level) {
  if (values.empty()) throw std::invalid_argument("bootstrap of an empty sample");
  const std::size_t n = values.size();
  std::vector<double> reps(static_cast<std::size_t>(resamples));
  for (auto& rep : reps) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += values[static_cast<std::size_t>(rng.engine()() % n)];
    }
    rep = s / static_cast<double>(n);
  }
  return percentile_interval(std::move(reps), level);
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("spearman needs >= 3 pairs");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(std::size_t n, std::size_t m, double significance) {
  const double c = std::sqrt(-0.5 * std::log(0.5 * significance));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double jarque_bera(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double m = mean(xs);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double u = x - m;
    m2 += u * u;
    m3 += u * u * u;
    m4 += u * u * u * u;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double skew = m3 / std::pow(m2, 1.5);
  const double kurt = m4 / (m2 * m2);
  return n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
}

}  // namespace gmclab::stats
