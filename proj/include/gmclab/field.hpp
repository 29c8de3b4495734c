#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "gmclab/geometry.hpp"
#include "gmclab/kernels.hpp"
#include "gmclab/rng.hpp"

namespace gmclab {

/// Regular lattice of N^d cells over [origin, origin + side]^d. Sites are
/// cell centers, indexed row-major with the x axis fastest.
struct Lattice {
  int d = 1;
  int n = 2;
  double origin = 0.0;
  double side = 1.0;

  static constexpr std::size_t kMaxSites = std::size_t{1} << 24;

  Lattice() = default;
  Lattice(int dim, int per_side, double origin = 0.0, double side = 1.0);

  double spacing() const { return side / n; }
  double cell_volume() const;
  std::size_t site_count() const;
  Point site(std::size_t index) const;
  Box domain() const;
  bool contains(const Point& p) const { return domain().contains(p); }
  /// Cell whose center is nearest to p; p must lie in the domain.
  std::size_t cell_of(const Point& p) const;

  friend bool operator==(const Lattice&, const Lattice&) = default;
};

/// One Gaussian layer Y^n sampled at the lattice sites.
struct FieldLayer {
  Lattice lattice;
  int level = 0;
  std::vector<double> values;
  double variance0 = 0.0;               // q_n(0) for stationary families
  std::vector<double> site_variance;    // q_n(x, x) per site, non-stationary only
};

/// X^n at the lattice sites together with its variance profile.
struct FieldGrid {
  Lattice lattice;
  int level = 0;
  std::vector<double> values;
  double variance0 = 0.0;               // k_n(0)
  std::vector<double> site_variance;    // k_n(x, x) per site when non-stationary
  std::vector<FieldLayer> layers;       // kept only when requested

  double variance_at(std::size_t site) const {
    return site_variance.empty() ? variance0 : site_variance[site];
  }
};

/// Draws centered Gaussian vectors over a lattice with a fixed covariance.
class GaussianSampler {
 public:
  virtual ~GaussianSampler() = default;
  virtual std::vector<double> draw(RngStream& rng) const = 0;
  virtual const Lattice& lattice() const = 0;
};

/// Circulant embedding on a torus of 2 * pad * N cells per axis. Negative
/// eigenvalues are clipped when their mass is below kClipTolerance of the
/// total spectrum mass; otherwise the padding is doubled (up to kMaxPadding)
/// and construction fails past that.
class CirculantSampler final : public GaussianSampler {
 public:
  static constexpr double kClipTolerance = 1e-6;
  static constexpr int kMaxPadding = 8;

  CirculantSampler(const Lattice& lattice, const std::function<double(double)>& radial_covariance);
  ~CirculantSampler() override;
  CirculantSampler(const CirculantSampler&) = delete;
  CirculantSampler& operator=(const CirculantSampler&) = delete;

  std::vector<double> draw(RngStream& rng) const override;
  const Lattice& lattice() const override { return lattice_; }

  int torus_size() const { return torus_; }
  double clipped_fraction() const { return clipped_fraction_; }

 private:
  Lattice lattice_;
  int torus_ = 0;
  double clipped_fraction_ = 0.0;
  std::vector<double> amplitude_;  // sqrt(eigenvalue / torus volume)
  void* plan_ = nullptr;
};

/// Cholesky factor of the dense covariance matrix, regularized by
/// kDiagonalRegularization * max diagonal.
class DenseSampler final : public GaussianSampler {
 public:
  static constexpr std::size_t kMaxSites = 4096;
  static constexpr double kDiagonalRegularization = 1e-12;

  DenseSampler(const Lattice& lattice,
               const std::function<double(const Point&, const Point&)>& covariance);
  ~DenseSampler() override;
  DenseSampler(DenseSampler&&) noexcept;
  DenseSampler& operator=(DenseSampler&&) noexcept;

  std::vector<double> draw(RngStream& rng) const override;
  const Lattice& lattice() const override { return lattice_; }

 private:
  struct Factor;
  Lattice lattice_;
  std::unique_ptr<Factor> factor_;
};

enum class SamplerBackend { kAuto, kCirculant, kDense };
enum class CovarianceKind { kIncrement, kPartial };  // q_n or k_n

std::unique_ptr<GaussianSampler> make_sampler(const KernelSpec& spec, int n, CovarianceKind kind,
                                              const Lattice& lattice,
                                              SamplerBackend backend = SamplerBackend::kAuto);

/// Caches one sampler per (level, kind) for a kernel and lattice; thread safe.
class FieldSynthesizer {
 public:
  FieldSynthesizer(KernelSpec spec, Lattice lattice, SamplerBackend backend = SamplerBackend::kAuto);

  const KernelSpec& spec() const { return spec_; }
  const Lattice& lattice() const { return lattice_; }

  /// Y^n drawn from the stream (replica, n, field).
  FieldLayer layer(int n, std::uint64_t master_seed, std::uint64_t replica,
                   StreamPurpose purpose = StreamPurpose::kField);
  /// X^n drawn in one shot with covariance k_n from the stream (replica, n, purpose).
  FieldGrid field(int n, std::uint64_t master_seed, std::uint64_t replica,
                  StreamPurpose purpose = StreamPurpose::kField);
  /// X^n as the sum of independent layers 1..n.
  FieldGrid layered_field(int n, std::uint64_t master_seed, std::uint64_t replica, bool store_layers);

 private:
  const GaussianSampler& sampler(int n, CovarianceKind kind);
  double variance0(int n, CovarianceKind kind) const;
  std::vector<double> site_variance(int n, CovarianceKind kind);

  KernelSpec spec_;
  Lattice lattice_;
  SamplerBackend backend_;
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::unique_ptr<GaussianSampler>> samplers_;
  std::map<std::pair<int, int>, std::vector<double>> site_variances_;
};

/// One draw of Y^n (covariance q_n).
FieldLayer sample_layer(const KernelSpec& spec, int n, const Lattice& lattice, RngStream& rng,
                        SamplerBackend backend = SamplerBackend::kAuto);

/// Sitewise sum of layers; an empty list gives the zero field.
FieldGrid accumulate_field(const Lattice& lattice, std::span<const FieldLayer> layers,
                           bool store_layers = false);

// ---- Binary ensemble dump.
//
// Header (little endian): magic "GMCF", u32 version, u32 d, u32 N, u32 level,
// u32 family tag, u64 seed, u64 replica count. Then replica blocks of N^d
// f64 values in site order, then an index footer: u64 offset per replica,
// u64 replica count, magic "GMCX".

struct EnsembleHeader {
  std::uint32_t version = 1;
  std::uint32_t d = 1;
  std::uint32_t n = 0;
  std::uint32_t level = 0;
  std::uint32_t family = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 0;
};

void write_ensemble(const std::string& path, const EnsembleHeader& header,
                    std::span<const std::vector<double>> replicas);
std::vector<std::vector<double>> read_ensemble(const std::string& path, EnsembleHeader* header);

}  // namespace gmclab
