#include "gmclab/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace gmclab {

std::string_view family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::kExactScale1D: return "exact1d";
    case KernelFamily::kExactScale2D: return "exact2d";
    case KernelFamily::kStarScale: return "star";
    case KernelFamily::kGffSquare: return "gff-square";
  }
  return "unknown";
}

KernelFamily parse_family(std::string_view name) {
  if (name == "exact1d") return KernelFamily::kExactScale1D;
  if (name == "exact2d") return KernelFamily::kExactScale2D;
  if (name == "star") return KernelFamily::kStarScale;
  if (name == "gff-square") return KernelFamily::kGffSquare;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

std::string_view seed_name(SeedShape shape) {
  return shape == SeedShape::kGaussian ? "gaussian" : "exponential";
}

SeedShape parse_seed(std::string_view name) {
  if (name == "gaussian") return SeedShape::kGaussian;
  if (name == "exponential") return SeedShape::kExponential;
  throw std::invalid_argument("unknown star seed kernel '" + std::string(name) + "'");
}

KernelSpec KernelSpec::exact1d(double T) { return {KernelFamily::kExactScale1D, T, 1}; }
KernelSpec KernelSpec::exact2d(double T) { return {KernelFamily::kExactScale2D, T, 2}; }
KernelSpec KernelSpec::star(int d, double T, SeedShape seed) {
  return {KernelFamily::kStarScale, T, d, seed};
}
KernelSpec KernelSpec::gff_square() { return {KernelFamily::kGffSquare, 1.0, 2}; }

void KernelSpec::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("kernel T must be positive");
  switch (family) {
    case KernelFamily::kExactScale1D:
      if (d != 1) throw std::invalid_argument("exact1d requires d = 1");
      break;
    case KernelFamily::kExactScale2D:
    case KernelFamily::kGffSquare:
      if (d != 2) throw std::invalid_argument(std::string(family_name(family)) + " requires d = 2");
      break;
    case KernelFamily::kStarScale:
      if (d != 1 && d != 2) throw std::invalid_argument("star kernels support d = 1 or 2");
      break;
  }
}

LevelRange::LevelRange(int lo, int hi) : n_min(lo), n_max(hi) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("level range requires 1 <= n_min <= n_max");
}

namespace {

void check_level(int n) {
  if (n < 1) throw std::invalid_argument("kernel level must be >= 1");
}

double e1(double z) { return -std::expint(-z); }

double seed_value(SeedShape shape, double r) {
  return shape == SeedShape::kGaussian ? std::exp(-r * r) : std::exp(-r);
}

// int_{2^lo}^{2^hi} k(r u / T) / u du, integrated in v = ln u.
double star_integral(const KernelSpec& spec, int lo, int hi, double r) {
  const double a = lo * std::numbers::ln2;
  const double b = hi * std::numbers::ln2;
  if (r == 0.0) return b - a;
  const double scale = r / spec.T;
  auto integrand = [&](double v) { return seed_value(spec.seed, scale * std::exp(v)); };
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, a, b, 20, kStarQuadratureTolerance, &error, &l1);
  if (error > kStarQuadratureTolerance * l1 && error > 1e-300) {
    throw QuadratureError("star kernel quadrature did not converge (error " +
                          std::to_string(error) + ")");
  }
  return value;
}

// ---- Dirichlet heat kernel on the unit square, Brownian time scale (variance t).

constexpr double kEigenSplit = 0.25;

void check_interior(const Point& p) {
  for (int a = 0; a < 2; ++a) {
    if (!(p[a] > 0.0 && p[a] < 1.0)) {
      throw std::domain_error("gff-square points must lie strictly inside the unit square");
    }
  }
}

// pi * int_{t0}^inf p_D(t, x, y) dt from the sine series; terms below 1e-12 dropped.
double heat_tail_eigen(double t0, const Point& x, const Point& y) {
  constexpr double pi = std::numbers::pi;
  constexpr int kMaxMode = 64;
  double sum = 0.0;
  for (int m1 = 1; m1 <= kMaxMode; ++m1) {
    const double s1 = std::sin(m1 * pi * x[0]) * std::sin(m1 * pi * y[0]);
    double row = 0.0;
    bool any = false;
    for (int m2 = 1; m2 <= kMaxMode; ++m2) {
      const double lambda = 0.5 * pi * pi * (m1 * m1 + m2 * m2);
      const double bound = 4.0 * std::exp(-lambda * t0) / lambda;
      if (bound < 1e-12) break;
      any = true;
      row += std::sin(m2 * pi * x[1]) * std::sin(m2 * pi * y[1]) * std::exp(-lambda * t0) / lambda;
    }
    if (!any) break;
    sum += 4.0 * s1 * row;
  }
  return pi * sum;
}

// pi * int_a^b p_D(t, x, y) dt by the method of images (5 x 5 image array),
// each Gaussian image integrated in time exactly through E1.
double heat_slice_images(double a, double b, const Point& x, const Point& y) {
  double sum = 0.0;
  for (int k1 = -2; k1 <= 2; ++k1) {
    for (int k2 = -2; k2 <= 2; ++k2) {
      for (int s1 = 0; s1 < 2; ++s1) {
        for (int s2 = 0; s2 < 2; ++s2) {
          const double d1 = s1 == 0 ? y[0] - x[0] + 2.0 * k1 : y[0] + x[0] + 2.0 * k1;
          const double d2 = s2 == 0 ? y[1] - x[1] + 2.0 * k2 : y[1] + x[1] + 2.0 * k2;
          const double sign = (s1 + s2) % 2 == 0 ? 1.0 : -1.0;
          const double r2 = d1 * d1 + d2 * d2;
          double term;
          if (r2 < 1e-300) {
            term = 0.5 * std::log(b / a);
          } else {
            term = 0.5 * (e1(r2 / (2.0 * b)) - e1(r2 / (2.0 * a)));
          }
          sum += sign * term;
        }
      }
    }
  }
  return sum;
}

double slice_start(int n) { return std::ldexp(1.0, -2 * n); }  // 4^-n

}  // namespace

double exact_cutoff_kernel(const KernelSpec& spec, double cutoff, double r) {
  const double T = spec.T;
  r = std::abs(r);
  if (r > T) return 0.0;
  if (r >= cutoff) return std::log(T / r);
  const double head = std::log(T / cutoff);
  if (spec.family == KernelFamily::kExactScale2D) return head + 2.0 * (1.0 - std::sqrt(r / cutoff));
  return head + (1.0 - r / cutoff);
}

double partial_kernel_radial(const KernelSpec& spec, int n, double r) {
  check_level(n);
  switch (spec.family) {
    case KernelFamily::kExactScale1D:
    case KernelFamily::kExactScale2D: {
      const double T = spec.T;
      r = std::abs(r);
      if (r > T) return 0.0;
      if (r * n >= T) return std::log(T / r);
      const double head = std::log(static_cast<double>(n));
      if (spec.family == KernelFamily::kExactScale2D) return head + 2.0 * (1.0 - std::sqrt(n * r / T));
      return head + (1.0 - n * r / T);
    }
    case KernelFamily::kStarScale:
      return star_integral(spec, 1, n + 1, r);
    case KernelFamily::kGffSquare:
      break;
  }
  throw std::invalid_argument("gff-square is not stationary; use eval_partial_kernel");
}

double level_increment_radial(const KernelSpec& spec, int n, double r) {
  check_level(n);
  if (spec.family == KernelFamily::kStarScale) return star_integral(spec, n, n + 1, r);
  if (n == 1) return partial_kernel_radial(spec, 1, r);
  return partial_kernel_radial(spec, n, r) - partial_kernel_radial(spec, n - 1, r);
}

double limit_kernel_radial(const KernelSpec& spec, double r) {
  r = std::abs(r);
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  switch (spec.family) {
    case KernelFamily::kExactScale1D:
    case KernelFamily::kExactScale2D:
      return r >= spec.T ? 0.0 : std::log(spec.T / r);
    case KernelFamily::kStarScale: {
      const double z = 2.0 * r / spec.T;
      return spec.seed == SeedShape::kGaussian ? 0.5 * e1(z * z) : e1(z);
    }
    case KernelFamily::kGffSquare:
      break;
  }
  throw std::invalid_argument("gff-square is not stationary");
}

double gff_square_partial(int n, const Point& x, const Point& y) {
  check_level(n);
  check_interior(x);
  check_interior(y);
  double value = heat_tail_eigen(kEigenSplit, x, y);
  if (n >= 2) value += heat_slice_images(slice_start(n), kEigenSplit, x, y);
  return value;
}

double gff_square_level(const KernelSpec& spec, int n, const Point& x, const Point& y) {
  if (spec.family != KernelFamily::kGffSquare) {
    throw std::invalid_argument("gff_square_level requires the gff-square family");
  }
  check_level(n);
  check_interior(x);
  check_interior(y);
  if (n == 1) return heat_tail_eigen(kEigenSplit, x, y);
  return heat_slice_images(slice_start(n), slice_start(n - 1), x, y);
}

double eval_partial_kernel(const KernelSpec& spec, int n, const Point& x, const Point& y) {
  spec.validate();
  if (spec.family == KernelFamily::kGffSquare) return gff_square_partial(n, x, y);
  return partial_kernel_radial(spec, n, distance(x, y, spec.d));
}

double eval_level_increment(const KernelSpec& spec, int n, const Point& x, const Point& y) {
  spec.validate();
  if (spec.family == KernelFamily::kGffSquare) return gff_square_level(spec, n, x, y);
  return level_increment_radial(spec, n, distance(x, y, spec.d));
}

}  // namespace gmclab
