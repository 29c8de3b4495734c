#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "gmclab/analysis.hpp"

namespace gmclab {

// ---------------------------------------------------------------- self-similar sets

SelfSimilarSet SelfSimilarSet::cantor_triadic() { return {"cantor", 1, 3, {{0, 0}, {2, 0}}}; }

SelfSimilarSet SelfSimilarSet::full(int d, int base) {
  if (d < 1 || d > 2 || base < 2) throw std::invalid_argument("full set needs d in {1,2}, base >= 2");
  SelfSimilarSet s{"full", d, base, {}};
  for (int j = 0; j < (d == 2 ? base : 1); ++j) {
    for (int i = 0; i < base; ++i) s.digits.push_back({i, j});
  }
  return s;
}

SelfSimilarSet SelfSimilarSet::sierpinski_dyadic() {
  return {"sierpinski", 2, 2, {{0, 0}, {1, 0}, {0, 1}}};
}

SelfSimilarSet SelfSimilarSet::by_name(const std::string& name) {
  if (name == "cantor") return cantor_triadic();
  if (name == "sierpinski") return sierpinski_dyadic();
  throw std::invalid_argument("unknown self-similar set '" + name + "' (expected cantor or sierpinski)");
}

double SelfSimilarSet::dimension() const {
  return std::log(static_cast<double>(digits.size())) / (d * std::log(static_cast<double>(base)));
}

namespace {

// integer cell coordinates of the kept cells at a given depth
std::vector<std::array<std::uint64_t, 2>> cover_cells(const SelfSimilarSet& set, int depth) {
  if (depth < 0 || depth > 20) throw std::invalid_argument("cover depth out of range");
  std::vector<std::array<std::uint64_t, 2>> cells{{0, 0}};
  for (int g = 0; g < depth; ++g) {
    std::vector<std::array<std::uint64_t, 2>> next;
    next.reserve(cells.size() * set.digits.size());
    for (const auto& c : cells) {
      for (const auto& dg : set.digits) {
        next.push_back({c[0] * set.base + dg[0], c[1] * set.base + dg[1]});
      }
    }
    cells = std::move(next);
  }
  return cells;
}

double ipow(int base, int e) { return std::pow(static_cast<double>(base), e); }

std::vector<double> sums_over(const std::vector<double>& masses, std::span<const double> s_grid) {
  std::vector<double> out;
  for (double s : s_grid) {
    double acc = 0.0;
    for (double m : masses) {
      if (m > 0.0) acc += std::pow(m, s);
    }
    out.push_back(acc);
  }
  return out;
}

CoveringSumTable empty_table(const SelfSimilarSet& set, std::span<const int> levels,
                             std::span<const double> s_grid) {
  CoveringSumTable t;
  t.set_name = set.name;
  t.s_grid.assign(s_grid.begin(), s_grid.end());
  t.levels.assign(levels.begin(), levels.end());
  return t;
}

}  // namespace

std::vector<Box> SelfSimilarSet::cover(int depth) const {
  const double side = 1.0 / ipow(base, depth);
  std::vector<Box> out;
  for (const auto& c : cover_cells(*this, depth)) {
    const double x = static_cast<double>(c[0]) * side;
    if (d == 1) {
      out.push_back(Box::interval(x, x + side));
    } else {
      const double y = static_cast<double>(c[1]) * side;
      out.push_back(Box::square(x, y, x + side, y + side));
    }
  }
  return out;
}

CoveringSumTable covering_sums(const LatticeMeasure& m, const SelfSimilarSet& set,
                               std::span<const int> levels, std::span<const double> s_grid) {
  if (m.lattice.d != set.d) throw std::invalid_argument("set dimension does not match the measure");
  auto t = empty_table(set, levels, s_grid);
  for (int level : levels) {
    if (ipow(set.base, level) > m.lattice.n) {
      throw std::invalid_argument("covering level finer than the lattice resolution");
    }
    std::vector<double> masses;
    for (const auto& box : set.cover(level)) masses.push_back(measure_box(m, box));
    t.sums.push_back(sums_over(masses, s_grid));
  }
  return t;
}

CoveringSumTable covering_sums(const AtomicMeasure& m, const SelfSimilarSet& set,
                               std::span<const int> levels, std::span<const double> s_grid) {
  if (m.d != set.d) throw std::invalid_argument("set dimension does not match the measure");
  auto t = empty_table(set, levels, s_grid);
  for (int level : levels) {
    const double cells = ipow(set.base, level);
    auto kept = cover_cells(set, level);
    std::vector<std::uint64_t> keys;
    keys.reserve(kept.size());
    for (const auto& c : kept) keys.push_back((c[1] << 32) | c[0]);
    std::sort(keys.begin(), keys.end());
    std::vector<double> masses(keys.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& p = m.positions[i];
      if (p[0] < 0.0 || p[0] >= 1.0 || (set.d == 2 && (p[1] < 0.0 || p[1] >= 1.0))) continue;
      const auto cx = static_cast<std::uint64_t>(p[0] * cells);
      const auto cy = set.d == 2 ? static_cast<std::uint64_t>(p[1] * cells) : 0;
      const std::uint64_t key = (cy << 32) | cx;
      const auto it = std::lower_bound(keys.begin(), keys.end(), key);
      if (it != keys.end() && *it == key) masses[static_cast<std::size_t>(it - keys.begin())] += m.masses[i];
    }
    t.sums.push_back(sums_over(masses, s_grid));
  }
  return t;
}

CoveringSumTable covering_sums_lebesgue(const SelfSimilarSet& set, std::span<const int> levels,
                                        std::span<const double> s_grid) {
  auto t = empty_table(set, levels, s_grid);
  for (int level : levels) {
    const double count = ipow(static_cast<int>(set.digits.size()), level);
    const double vol = std::pow(ipow(set.base, level), -set.d);
    std::vector<double> row;
    for (double s : s_grid) row.push_back(count * std::pow(vol, s));
    t.sums.push_back(row);
  }
  return t;
}

namespace {

struct Crossing {
  bool found = false;
  double s = 0.0;
};

Crossing zero_crossing(std::span<const double> s_grid, const std::vector<double>& slopes) {
  for (std::size_t i = 0; i + 1 < slopes.size(); ++i) {
    if (slopes[i] >= 0.0 && slopes[i + 1] < 0.0) {
      const double t = slopes[i] / (slopes[i] - slopes[i + 1]);
      return {true, s_grid[i] + t * (s_grid[i + 1] - s_grid[i])};
    }
  }
  return {};
}

std::vector<double> level_slopes(std::span<const CoveringSumTable> reps,
                                 const std::vector<std::size_t>& pick) {
  const auto& first = reps.front();
  std::vector<double> x(first.levels.begin(), first.levels.end());
  std::vector<double> slopes;
  for (std::size_t si = 0; si < first.s_grid.size(); ++si) {
    std::vector<double> y;
    for (std::size_t li = 0; li < first.levels.size(); ++li) {
      double acc = 0.0;
      for (auto r : pick) acc += reps[r].sums[li][si];
      y.push_back(std::log(acc / static_cast<double>(pick.size())));
    }
    slopes.push_back(stats::ols(x, y).slope);
  }
  return slopes;
}

}  // namespace

DimensionEstimate dimension_estimate(std::span<const CoveringSumTable> replicas, int bootstrap,
                                     RngStream& rng) {
  if (replicas.empty()) throw std::invalid_argument("dimension estimate needs covering sums");
  const auto& first = replicas.front();
  if (first.levels.size() < 3) throw std::invalid_argument("dimension estimate needs at least 3 levels");
  if (first.s_grid.size() < 5) throw std::invalid_argument("dimension estimate needs at least 5 s values");
  for (const auto& t : replicas) {
    if (t.levels != first.levels || t.s_grid != first.s_grid || t.sums.size() != t.levels.size()) {
      throw std::invalid_argument("covering tables use different grids");
    }
  }
  std::vector<std::size_t> all(replicas.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  DimensionEstimate out;
  out.slopes = level_slopes(replicas, all);
  const auto c = zero_crossing(first.s_grid, out.slopes);
  if (!c.found) throw std::runtime_error("s grid does not bracket the dimension (no sign change of the level slope)");
  out.s_star = out.ci_lo = out.ci_hi = c.s;

  if (bootstrap >= 2 && replicas.size() >= 2) {
    std::vector<double> boot;
    std::vector<std::size_t> pick(replicas.size());
    for (int b = 0; b < bootstrap; ++b) {
      for (auto& i : pick) i = static_cast<std::size_t>(rng.engine()() % replicas.size());
      const auto cb = zero_crossing(first.s_grid, level_slopes(replicas, pick));
      if (cb.found) boot.push_back(cb.s);
    }
    if (!boot.empty()) {
      const auto ci = stats::percentile_interval(std::move(boot));
      out.ci_lo = std::min(ci.lo, out.s_star);
      out.ci_hi = std::max(ci.hi, out.s_star);
    }
  }
  return out;
}

// ---------------------------------------------------------------- KPZ

namespace {

void check_kpz(double dim_leb, double gamma2, int d) {
  if (!(dim_leb >= 0.0 && dim_leb <= 1.0)) throw std::invalid_argument("dimension must lie in [0, 1]");
  if (d < 1 || d > 2) throw std::invalid_argument("d must be 1 or 2");
  if (!(gamma2 > 0.0 && gamma2 < 2.0 * d)) throw std::invalid_argument("gamma^2 out of (0, 2d)");
}

// smallest root of a x^2 - b x + c = 0 in [0, hi] for f(x) = b x - a x^2 increasing there
double increasing_root(double a, double b, double c, double hi) {
  const double disc = b * b - 4.0 * a * c;
  double x = 2.0 * c / (b + std::sqrt(std::max(disc, 0.0)));
  const double scale = std::max(1.0, c);
  if (disc >= 0.0 && x >= 0.0 && x <= hi && std::abs(b * x - a * x * x - c) <= 1e-13 * scale) return x;
  double lo = 0.0;
  double up = hi;
  for (int it = 0; it < 200; ++it) {
    x = 0.5 * (lo + up);
    (b * x - a * x * x < c ? lo : up) = x;
  }
  return 0.5 * (lo + up);
}

}  // namespace

double kpz_solve(double dim_leb, double gamma2, int d) {
  check_kpz(dim_leb, gamma2, d);
  return increasing_root(0.5 * gamma2, d + 0.5 * gamma2, d * dim_leb, 1.0);
}

double kpz_solve_dual(double dim_leb, double gamma2, int d) {
  check_kpz(dim_leb, gamma2, d);
  const double alpha = gamma2 / (2.0 * d);
  const double gb2 = gamma2 / (alpha * alpha);
  return increasing_root(0.5 * gb2, d + 0.5 * gb2, d * dim_leb, alpha);
}

}  // namespace gmclab
