#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "gmclab/analysis.hpp"

namespace gmclab {

namespace {

// stat[r][l] = mean over boxes of mass^q for replica r and radius l.
std::vector<std::vector<double>> replica_moments(const BoxMassSamples& s, double q) {
  const std::size_t reps = s.replicas();
  std::vector<std::vector<double>> out(reps, std::vector<double>(s.lambdas.size()));
  for (std::size_t l = 0; l < s.lambdas.size(); ++l) {
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& boxes = s.masses[l][r];
      if (boxes.empty()) throw std::invalid_argument("replica without box masses");
      double acc = 0.0;
      for (double m : boxes) acc += std::pow(m, q);
      out[r][l] = acc / static_cast<double>(boxes.size());
    }
  }
  return out;
}

std::vector<double> log_means(const std::vector<std::vector<double>>& stat,
                              const std::vector<std::size_t>* pick) {
  const std::size_t nl = stat.front().size();
  const std::size_t count = pick ? pick->size() : stat.size();
  std::vector<double> out(nl, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& row = stat[pick ? (*pick)[i] : i];
    for (std::size_t l = 0; l < nl; ++l) out[l] += row[l];
  }
  for (auto& v : out) {
    v = std::log(v / static_cast<double>(count));
    if (!std::isfinite(v)) throw std::runtime_error("non-finite empirical moment");
  }
  return out;
}

}  // namespace

SpectrumFit estimate_spectrum(const BoxMassSamples& samples, std::span<const double> q_grid,
                              int bootstrap, RngStream& rng) {
  if (q_grid.empty()) throw std::invalid_argument("empty q grid");
  std::vector<double> sorted = samples.lambdas;
  std::sort(sorted.begin(), sorted.end());
  if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 4) {
    throw std::invalid_argument("spectrum fit needs at least 4 distinct radii");
  }
  if (samples.masses.size() != samples.lambdas.size() || samples.replicas() == 0) {
    throw std::invalid_argument("mass samples do not match the radius grid");
  }
  std::vector<double> log_lambda;
  for (double l : samples.lambdas) log_lambda.push_back(std::log(l));

  SpectrumFit fit;
  fit.q_grid.assign(q_grid.begin(), q_grid.end());
  fit.lambda_grid = samples.lambdas;
  const std::size_t reps = samples.replicas();

  // one set of bootstrap index draws shared by all q
  std::vector<std::vector<std::size_t>> picks(static_cast<std::size_t>(std::max(bootstrap, 0)),
                                              std::vector<std::size_t>(reps));
  for (auto& pick : picks) {
    for (auto& i : pick) i = static_cast<std::size_t>(rng.engine()() % reps);
  }

  for (double q : q_grid) {
    const auto stat = replica_moments(samples, q);
    const auto logs = log_means(stat, nullptr);
    const auto ols = stats::ols(log_lambda, logs);
    fit.slopes.push_back(ols.slope);
    fit.intercepts.push_back(ols.intercept);
    fit.r2.push_back(ols.r2);
    fit.curvature.push_back(stats::quadratic_coefficient(log_lambda, logs));
    fit.log_moments.push_back(logs);
    if (picks.size() > 1) {
      std::vector<double> boot;
      boot.reserve(picks.size());
      for (const auto& pick : picks) boot.push_back(stats::ols(log_lambda, log_means(stat, &pick)).slope);
      fit.stderr_.push_back(std::sqrt(stats::variance(boot)));
    } else {
      fit.stderr_.push_back(ols.slope_stderr);
    }
  }
  return fit;
}

// ---------------------------------------------------------------- L^q spectrum

double lq_lower_switch(double gamma2, double alpha, int d) {
  auto xb = [&](double q) { return xi_bar(gamma2, alpha, d, q); };
  auto dxb = [&](double q) { return ((d + 0.5 * gamma2) - gamma2 * (q / alpha)) / alpha; };
  auto f = [&](double q) { return dxb(q) * q - xb(q) + d; };
  double lo = -1.0;
  while (f(lo) > 0.0) {
    lo *= 2.0;
    if (lo < -1e12) throw std::runtime_error("no negative switch point found");
  }
  double hi = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double conjectured_tau_atomic(double gamma2, double alpha, int d, double q) {
  if (q >= alpha) return 0.0;
  const double qm = lq_lower_switch(gamma2, alpha, d);
  if (q >= qm) return xi_bar(gamma2, alpha, d, q) - d;
  const double slope = ((d + 0.5 * gamma2) - gamma2 * (qm / alpha)) / alpha;
  return slope * q;
}

namespace {

LqResult fit_box_sums(const std::vector<std::vector<double>>& box_masses,
                      std::span<const double> q_grid, std::span<const int> depths, double side) {
  if (depths.size() < 2) throw std::invalid_argument("lq spectrum needs at least 2 depths");
  LqResult out;
  out.fit.q_grid.assign(q_grid.begin(), q_grid.end());
  std::vector<double> log_r;
  for (int j : depths) {
    out.fit.lambda_grid.push_back(side * std::ldexp(1.0, -j));
    log_r.push_back(std::log(out.fit.lambda_grid.back()));
  }
  for (double q : q_grid) {
    std::vector<double> logs;
    for (const auto& masses : box_masses) {
      double s = 0.0;
      for (double m : masses) {
        if (m > 0.0) s += std::pow(m, q);
      }
      logs.push_back(std::log(s));
    }
    const auto ols = stats::ols(log_r, logs);
    out.fit.slopes.push_back(ols.slope);
    out.fit.stderr_.push_back(ols.slope_stderr);
    out.fit.intercepts.push_back(ols.intercept);
    out.fit.r2.push_back(ols.r2);
    out.fit.curvature.push_back(stats::quadratic_coefficient(log_r, logs));
    out.fit.log_moments.push_back(std::move(logs));
  }
  return out;
}

}  // namespace

LqResult lq_spectrum(const LatticeMeasure& m, std::span<const double> q_grid,
                     std::span<const int> depths) {
  if (!(m.total() > 0.0)) throw std::invalid_argument("lq spectrum of an empty measure");
  const Lattice& lat = m.lattice;
  std::vector<std::vector<double>> boxes;
  for (int j : depths) {
    const int cells = 1 << j;
    if (j < 0 || lat.n % cells != 0) {
      throw std::invalid_argument("dyadic depth does not divide the lattice resolution");
    }
    const int block = lat.n / cells;
    std::vector<double> masses(lat.d == 1 ? cells : std::size_t(cells) * cells, 0.0);
    for (std::size_t i = 0; i < m.masses.size(); ++i) {
      const std::size_t ix = (i % lat.n) / block;
      const std::size_t iy = lat.d == 2 ? (i / lat.n) / block : 0;
      masses[iy * cells + ix] += m.masses[i];
    }
    boxes.push_back(std::move(masses));
  }
  auto out = fit_box_sums(boxes, q_grid, depths, lat.side);
  for (double q : q_grid) out.reference.push_back(xi(m.meta.gamma2, lat.d, q) - lat.d);
  return out;
}

LqResult lq_spectrum(const AtomicMeasure& m, std::span<const double> q_grid,
                     std::span<const int> depths) {
  if (m.size() == 0 || !(m.total() > 0.0)) throw std::invalid_argument("lq spectrum of an empty measure");
  std::vector<std::vector<double>> boxes;
  for (int j : depths) {
    if (j < 0 || j > 30) throw std::invalid_argument("dyadic depth out of range");
    const double cells = std::ldexp(1.0, j);
    std::vector<std::pair<std::uint64_t, double>> keyed;
    keyed.reserve(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto cx = static_cast<std::uint64_t>(std::clamp(std::floor(m.positions[i][0] * cells), 0.0, cells - 1));
      const auto cy = m.d == 2 ? static_cast<std::uint64_t>(std::clamp(std::floor(m.positions[i][1] * cells), 0.0, cells - 1)) : 0;
      keyed.emplace_back((cy << 32) | cx, m.masses[i]);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<double> masses;
    for (std::size_t i = 0; i < keyed.size();) {
      double s = 0.0;
      std::size_t k = i;
      while (k < keyed.size() && keyed[k].first == keyed[i].first) s += keyed[k++].second;
      masses.push_back(s);
      i = k;
    }
    boxes.push_back(std::move(masses));
  }
  auto out = fit_box_sums(boxes, q_grid, depths, 1.0);
  for (double q : q_grid) {
    out.reference.push_back(conjectured_tau_atomic(m.meta.gamma2, m.meta.alpha, m.d, q));
  }
  return out;
}

}  // namespace gmclab
