#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace gmclab {

/// Disjoint purposes keep the Poisson atoms independent of the field layers
/// even when replica and level coincide.
enum class StreamPurpose : std::uint32_t {
  kField = 0,
  kAtoms = 1,
  kSubordination = 2,
  kBootstrap = 3,
  kOmega = 4,
  kSynthetic = 5,
  kSitePairs = 6,
  kReferenceField = 7,
};

std::string to_string(StreamPurpose purpose);

struct StreamPath {
  std::uint64_t replica = 0;
  std::uint64_t level = 0;
  StreamPurpose purpose = StreamPurpose::kField;
};

/// Deterministic substream: the engine state depends only on (master_seed, path).
class RngStream {
 public:
  using Engine = std::mt19937_64;

  RngStream(std::uint64_t master_seed, StreamPath path);

  Engine& engine() { return engine_; }
  std::uint64_t master_seed() const { return master_seed_; }
  const StreamPath& path() const { return path_; }

  double uniform();           // (0, 1), never returns 0
  double normal();            // standard Gaussian
  std::uint64_t poisson(double mean);

  /// Textual form used in manifests, e.g. "seed=42/replica=3/level=6/field".
  std::string describe() const;

 private:
  std::uint64_t master_seed_;
  StreamPath path_;
  Engine engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gmclab
