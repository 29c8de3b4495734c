#pragma once

// Covariance kernels of sigma-positive type, K = sum_n q_n, stored with unit
// coupling: K(x, y) = ln_+(T / |x - y|) + g(x, y). The coupling gamma is
// applied only when a chaos measure is built.

#include <stdexcept>
#include <string>
#include <string_view>

#include "gmclab/geometry.hpp"

namespace gmclab {

enum class KernelFamily { kExactScale1D, kExactScale2D, kStarScale, kGffSquare };

/// Seed kernel k of the star-scale family K(x) = int_1^inf k(xu)/u du.
enum class SeedShape { kGaussian, kExponential };

/// Config names: exact1d, exact2d, star, gff-square.
std::string_view family_name(KernelFamily family);
KernelFamily parse_family(std::string_view name);
std::string_view seed_name(SeedShape shape);
SeedShape parse_seed(std::string_view name);

struct KernelSpec {
  KernelFamily family = KernelFamily::kExactScale1D;
  double T = 1.0;
  int d = 1;
  SeedShape seed = SeedShape::kGaussian;

  static KernelSpec exact1d(double T = 1.0);
  static KernelSpec exact2d(double T = 1.0);
  static KernelSpec star(int d, double T = 1.0, SeedShape seed = SeedShape::kGaussian);
  static KernelSpec gff_square();

  bool stationary() const { return family != KernelFamily::kGffSquare; }
  /// Throws std::invalid_argument when T or d do not fit the family.
  void validate() const;
};

struct LevelRange {
  int n_min = 1;
  int n_max = 1;

  LevelRange(int lo, int hi);
  int count() const { return n_max - n_min + 1; }
};

/// Raised when adaptive quadrature cannot reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative tolerance of the star-scale level quadrature.
inline constexpr double kStarQuadratureTolerance = 1e-8;

/// k_n(x, y) = sum_{p <= n} q_p(x, y).
double eval_partial_kernel(const KernelSpec& spec, int n, const Point& x, const Point& y);

/// q_n(x, y) = k_n(x, y) - k_{n-1}(x, y), k_0 = 0.
double eval_level_increment(const KernelSpec& spec, int n, const Point& x, const Point& y);

/// Time-slice increment of the Dirichlet Green function on the unit square:
/// pi * int over slice n of p_D(t, x, y) dt. Slice 1 is [1/4, inf), slice n >= 2
/// is [4^-n, 4^-(n-1)]. Throws std::domain_error for points not strictly inside.
double gff_square_level(const KernelSpec& spec, int n, const Point& x, const Point& y);

/// pi * int_{4^-n}^inf p_D(t, x, y) dt, the GFF partial kernel.
double gff_square_partial(int n, const Point& x, const Point& y);

/// Stationary families as functions of r = |x - y|.
double partial_kernel_radial(const KernelSpec& spec, int n, double r);
double level_increment_radial(const KernelSpec& spec, int n, double r);

/// Exact-scale kernel with a continuous cutoff length l: k_n = k_{T/n}.
/// Satisfies k_{lambda l}(lambda r) = k_l(r) + ln(1/lambda) for r <= T.
double exact_cutoff_kernel(const KernelSpec& spec, double cutoff, double r);

/// The limit kernel K(r) (infinite at r = 0).
double limit_kernel_radial(const KernelSpec& spec, double r);

}  // namespace gmclab
