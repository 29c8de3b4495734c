#include "gmclab/field.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gmclab {

// ---------------------------------------------------------------- Lattice

Lattice::Lattice(int dim, int per_side, double origin_, double side_)
    : d(dim), n(per_side), origin(origin_), side(side_) {
  if (d != 1 && d != 2) throw std::invalid_argument("lattice dimension must be 1 or 2");
  if (n < 2) throw std::invalid_argument("lattice needs at least 2 sites per side");
  if (!(side > 0.0)) throw std::invalid_argument("lattice side must be positive");
  if (site_count() > kMaxSites) throw std::invalid_argument("lattice exceeds the site budget");
}

double Lattice::cell_volume() const {
  const double h = spacing();
  return d == 1 ? h : h * h;
}

std::size_t Lattice::site_count() const {
  const auto per = static_cast<std::size_t>(n);
  return d == 1 ? per : per * per;
}

Point Lattice::site(std::size_t index) const {
  const double h = spacing();
  const auto per = static_cast<std::size_t>(n);
  Point p{origin + (static_cast<double>(index % per) + 0.5) * h, 0.5};
  if (d == 2) p[1] = origin + (static_cast<double>(index / per) + 0.5) * h;
  return p;
}

Box Lattice::domain() const {
  Box b = Box::unit(d);
  for (int a = 0; a < d; ++a) {
    b.lo[a] = origin;
    b.hi[a] = origin + side;
  }
  return b;
}

std::size_t Lattice::cell_of(const Point& p) const {
  const double h = spacing();
  auto axis = [&](double x) {
    auto i = static_cast<long>(std::floor((x - origin) / h));
    return static_cast<std::size_t>(std::clamp(i, 0L, static_cast<long>(n) - 1));
  };
  if (d == 1) return axis(p[0]);
  return axis(p[1]) * static_cast<std::size_t>(n) + axis(p[0]);
}

// ---------------------------------------------------------------- circulant

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffer {
  explicit FftBuffer(std::size_t size) : data(fftw_alloc_complex(size)) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftBuffer() { fftw_free(data); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  fftw_complex* data;
};

fftw_plan make_plan(int d, int m, fftw_complex* buf) {
  std::lock_guard lock(planner_mutex());
  fftw_plan plan = d == 1 ? fftw_plan_dft_1d(m, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE)
                          : fftw_plan_dft_2d(m, m, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  return plan;
}

}  // namespace

CirculantSampler::CirculantSampler(const Lattice& lattice,
                                   const std::function<double(double)>& radial_covariance)
    : lattice_(lattice) {
  const int d = lattice.d;
  const double h = lattice.spacing();
  std::string last_failure;
  for (int pad = 1; pad <= kMaxPadding; pad *= 2) {
    const int m = 2 * lattice.n * pad;
    const std::size_t total = d == 1 ? std::size_t(m) : std::size_t(m) * std::size_t(m);
    FftBuffer buf(total);
    for (std::size_t k = 0; k < total; ++k) {
      const int j0 = static_cast<int>(k % std::size_t(m));
      const int j1 = static_cast<int>(k / std::size_t(m));
      const double a = std::min(j0, m - j0) * h;
      const double b = d == 2 ? std::min(j1, m - j1) * h : 0.0;
      buf.data[k][0] = radial_covariance(d == 1 ? a : std::hypot(a, b));
      buf.data[k][1] = 0.0;
    }
    fftw_plan plan = make_plan(d, m, buf.data);
    fftw_execute(plan);
    double positive = 0.0;
    double negative = 0.0;
    std::vector<double> eig(total);
    for (std::size_t k = 0; k < total; ++k) {
      eig[k] = buf.data[k][0];
      (eig[k] < 0.0 ? negative : positive) += std::abs(eig[k]);
    }
    const double mass = positive + negative;
    if (mass == 0.0 || negative <= kClipTolerance * mass) {
      clipped_fraction_ = mass == 0.0 ? 0.0 : negative / mass;
      torus_ = m;
      amplitude_.resize(total);
      for (std::size_t k = 0; k < total; ++k) {
        amplitude_[k] = std::sqrt(std::max(eig[k], 0.0) / static_cast<double>(total));
      }
      plan_ = plan;
      return;
    }
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
    last_failure = "negative spectrum fraction " + std::to_string(negative / mass);
  }
  throw std::runtime_error("circulant embedding is not nonnegative definite: " + last_failure);
}

CirculantSampler::~CirculantSampler() {
  if (plan_ != nullptr) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

std::vector<double> CirculantSampler::draw(RngStream& rng) const {
  const std::size_t total = amplitude_.size();
  FftBuffer buf(total);
  for (std::size_t k = 0; k < total; ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    buf.data[k][0] = amplitude_[k] * re;
    buf.data[k][1] = amplitude_[k] * im;
  }
  fftw_execute_dft(static_cast<fftw_plan>(plan_), buf.data, buf.data);
  const auto n = static_cast<std::size_t>(lattice_.n);
  const auto m = static_cast<std::size_t>(torus_);
  std::vector<double> out(lattice_.site_count());
  if (lattice_.d == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = buf.data[i][0];
  } else {
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      for (std::size_t i0 = 0; i0 < n; ++i0) out[i1 * n + i0] = buf.data[i1 * m + i0][0];
    }
  }
  return out;
}

// ---------------------------------------------------------------- dense

struct DenseSampler::Factor {
  Eigen::MatrixXd lower;
};

DenseSampler::DenseSampler(const Lattice& lattice,
                           const std::function<double(const Point&, const Point&)>& covariance)
    : lattice_(lattice), factor_(std::make_unique<Factor>()) {
  const std::size_t sites = lattice.site_count();
  if (sites > kMaxSites) {
    throw std::invalid_argument("dense backend supports at most 4096 sites, got " +
                                std::to_string(sites));
  }
  const auto s = static_cast<Eigen::Index>(sites);
  Eigen::MatrixXd gram(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const Point xi = lattice.site(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = covariance(xi, lattice.site(static_cast<std::size_t>(j)));
      gram(i, j) = c;
      gram(j, i) = c;
    }
  }
  const double ridge = kDiagonalRegularization * gram.diagonal().maxCoeff();
  gram.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("dense covariance is not positive definite");
  }
  factor_->lower = llt.matrixL();
}

DenseSampler::~DenseSampler() = default;
DenseSampler::DenseSampler(DenseSampler&&) noexcept = default;
DenseSampler& DenseSampler::operator=(DenseSampler&&) noexcept = default;

std::vector<double> DenseSampler::draw(RngStream& rng) const {
  const auto s = factor_->lower.rows();
  Eigen::VectorXd xi(s);
  for (Eigen::Index i = 0; i < s; ++i) xi(i) = rng.normal();
  Eigen::VectorXd y = factor_->lower.triangularView<Eigen::Lower>() * xi;
  return {y.data(), y.data() + s};
}

// ---------------------------------------------------------------- factories

std::unique_ptr<GaussianSampler> make_sampler(const KernelSpec& spec, int n, CovarianceKind kind,
                                              const Lattice& lattice, SamplerBackend backend) {
  spec.validate();
  if (spec.d != lattice.d) throw std::invalid_argument("kernel and lattice dimensions differ");
  if (n < 1) throw std::invalid_argument("level must be >= 1");
  if (backend == SamplerBackend::kAuto) {
    backend = spec.stationary() ? SamplerBackend::kCirculant : SamplerBackend::kDense;
  }
  if (backend == SamplerBackend::kCirculant) {
    if (!spec.stationary()) {
      throw std::invalid_argument("circulant embedding needs a stationary kernel family");
    }
    auto cov = [spec, n, kind](double r) {
      return kind == CovarianceKind::kPartial ? partial_kernel_radial(spec, n, r)
                                              : level_increment_radial(spec, n, r);
    };
    return std::make_unique<CirculantSampler>(lattice, cov);
  }
  auto cov = [spec, n, kind](const Point& x, const Point& y) {
    return kind == CovarianceKind::kPartial ? eval_partial_kernel(spec, n, x, y)
                                            : eval_level_increment(spec, n, x, y);
  };
  return std::make_unique<DenseSampler>(lattice, cov);
}

FieldSynthesizer::FieldSynthesizer(KernelSpec spec, Lattice lattice, SamplerBackend backend)
    : spec_(spec), lattice_(lattice), backend_(backend) {
  spec_.validate();
  if (spec_.d != lattice_.d) throw std::invalid_argument("kernel and lattice dimensions differ");
}

const GaussianSampler& FieldSynthesizer::sampler(int n, CovarianceKind kind) {
  std::lock_guard lock(mutex_);
  auto key = std::make_pair(n, static_cast<int>(kind));
  auto it = samplers_.find(key);
  if (it == samplers_.end()) {
    it = samplers_.emplace(key, make_sampler(spec_, n, kind, lattice_, backend_)).first;
  }
  return *it->second;
}

double FieldSynthesizer::variance0(int n, CovarianceKind kind) const {
  if (!spec_.stationary()) return 0.0;
  return kind == CovarianceKind::kPartial ? partial_kernel_radial(spec_, n, 0.0)
                                          : level_increment_radial(spec_, n, 0.0);
}

std::vector<double> FieldSynthesizer::site_variance(int n, CovarianceKind kind) {
  if (spec_.stationary()) return {};
  std::lock_guard lock(mutex_);
  auto key = std::make_pair(n, static_cast<int>(kind));
  if (auto it = site_variances_.find(key); it != site_variances_.end()) return it->second;
  std::vector<double> out(lattice_.site_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point x = lattice_.site(i);
    out[i] = kind == CovarianceKind::kPartial ? eval_partial_kernel(spec_, n, x, x)
                                              : eval_level_increment(spec_, n, x, x);
  }
  site_variances_.emplace(key, out);
  return out;
}

FieldLayer FieldSynthesizer::layer(int n, std::uint64_t master_seed, std::uint64_t replica,
                                   StreamPurpose purpose) {
  const auto& s = sampler(n, CovarianceKind::kIncrement);
  RngStream rng(master_seed, {replica, static_cast<std::uint64_t>(n), purpose});
  return FieldLayer{lattice_, n, s.draw(rng), variance0(n, CovarianceKind::kIncrement),
                    site_variance(n, CovarianceKind::kIncrement)};
}

FieldGrid FieldSynthesizer::field(int n, std::uint64_t master_seed, std::uint64_t replica,
                                  StreamPurpose purpose) {
  const auto& s = sampler(n, CovarianceKind::kPartial);
  RngStream rng(master_seed, {replica, static_cast<std::uint64_t>(n), purpose});
  FieldGrid grid;
  grid.lattice = lattice_;
  grid.level = n;
  grid.values = s.draw(rng);
  grid.variance0 = variance0(n, CovarianceKind::kPartial);
  grid.site_variance = site_variance(n, CovarianceKind::kPartial);
  return grid;
}

FieldGrid FieldSynthesizer::layered_field(int n, std::uint64_t master_seed, std::uint64_t replica,
                                          bool store_layers) {
  std::vector<FieldLayer> layers;
  layers.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) layers.push_back(layer(k, master_seed, replica));
  return accumulate_field(lattice_, layers, store_layers);
}

FieldLayer sample_layer(const KernelSpec& spec, int n, const Lattice& lattice, RngStream& rng,
                        SamplerBackend backend) {
  auto sampler = make_sampler(spec, n, CovarianceKind::kIncrement, lattice, backend);
  FieldLayer out{lattice, n, sampler->draw(rng), 0.0, {}};
  if (spec.stationary()) {
    out.variance0 = level_increment_radial(spec, n, 0.0);
  } else {
    out.site_variance.resize(lattice.site_count());
    for (std::size_t i = 0; i < out.site_variance.size(); ++i) {
      const Point x = lattice.site(i);
      out.site_variance[i] = eval_level_increment(spec, n, x, x);
    }
  }
  return out;
}

FieldGrid accumulate_field(const Lattice& lattice, std::span<const FieldLayer> layers,
                           bool store_layers) {
  FieldGrid grid;
  grid.lattice = lattice;
  grid.values.assign(lattice.site_count(), 0.0);
  bool stationary = true;
  for (const auto& layer : layers) {
    if (!(layer.lattice == lattice)) throw std::invalid_argument("layer lattice mismatch");
    if (layer.values.size() != grid.values.size()) {
      throw std::invalid_argument("layer size does not match the lattice");
    }
    if (!layer.site_variance.empty()) stationary = false;
  }
  if (!stationary) grid.site_variance.assign(lattice.site_count(), 0.0);
  for (const auto& layer : layers) {
    for (std::size_t i = 0; i < grid.values.size(); ++i) grid.values[i] += layer.values[i];
    grid.variance0 += layer.variance0;
    if (!stationary) {
      for (std::size_t i = 0; i < grid.site_variance.size(); ++i) {
        grid.site_variance[i] +=
            layer.site_variance.empty() ? layer.variance0 : layer.site_variance[i];
      }
    }
    grid.level = std::max(grid.level, layer.level);
  }
  if (store_layers) grid.layers.assign(layers.begin(), layers.end());
  return grid;
}

// ---------------------------------------------------------------- ensemble I/O

namespace {

constexpr char kMagic[4] = {'G', 'M', 'C', 'F'};
constexpr char kFooterMagic[4] = {'G', 'M', 'C', 'X'};
constexpr std::size_t kHeaderBytes = 4 + 5 * 4 + 2 * 8;

template <class T>
void put(std::ostream& os, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  os.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bits{};
  is.read(reinterpret_cast<char*>(bits.data()), sizeof(T));
  if (!is) throw std::runtime_error("truncated ensemble file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_ensemble(const std::string& path, const EnsembleHeader& header,
                    std::span<const std::vector<double>> replicas) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  const std::size_t sites = header.d == 1 ? header.n : std::size_t(header.n) * header.n;
  os.write(kMagic, 4);
  put<std::uint32_t>(os, header.version);
  put<std::uint32_t>(os, header.d);
  put<std::uint32_t>(os, header.n);
  put<std::uint32_t>(os, header.level);
  put<std::uint32_t>(os, header.family);
  put<std::uint64_t>(os, header.seed);
  put<std::uint64_t>(os, replicas.size());
  std::vector<std::uint64_t> offsets;
  std::uint64_t offset = kHeaderBytes;
  for (const auto& values : replicas) {
    if (values.size() != sites) throw std::invalid_argument("replica size does not match header");
    offsets.push_back(offset);
    for (double v : values) put<double>(os, v);
    offset += sites * sizeof(double);
  }
  for (auto o : offsets) put<std::uint64_t>(os, o);
  put<std::uint64_t>(os, replicas.size());
  os.write(kFooterMagic, 4);
  if (!os) throw std::runtime_error("failed writing " + path);
}

std::vector<std::vector<double>> read_ensemble(const std::string& path, EnsembleHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad ensemble magic");
  EnsembleHeader h;
  h.version = get<std::uint32_t>(is);
  h.d = get<std::uint32_t>(is);
  h.n = get<std::uint32_t>(is);
  h.level = get<std::uint32_t>(is);
  h.family = get<std::uint32_t>(is);
  h.seed = get<std::uint64_t>(is);
  h.replicas = get<std::uint64_t>(is);
  if (h.version != 1) throw std::runtime_error("unsupported ensemble version");
  const std::size_t sites = h.d == 1 ? h.n : std::size_t(h.n) * h.n;
  std::vector<std::vector<double>> out(h.replicas, std::vector<double>(sites));
  for (auto& values : out) {
    for (auto& v : values) v = get<double>(is);
  }
  for (std::uint64_t r = 0; r < h.replicas; ++r) {
    const auto o = get<std::uint64_t>(is);
    if (o != kHeaderBytes + r * sites * sizeof(double)) throw std::runtime_error("bad ensemble index");
  }
  if (get<std::uint64_t>(is) != h.replicas) throw std::runtime_error("bad ensemble footer");
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kFooterMagic, 4) != 0) throw std::runtime_error("bad footer magic");
  if (header != nullptr) *header = h;
  return out;
}

}  // namespace gmclab
