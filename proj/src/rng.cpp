#include "gmclab/rng.hpp"

#include <array>

namespace gmclab {

std::string to_string(StreamPurpose purpose) {
  switch (purpose) {
    case StreamPurpose::kField: return "field";
    case StreamPurpose::kAtoms: return "atoms";
    case StreamPurpose::kSubordination: return "subordination";
    case StreamPurpose::kBootstrap: return "bootstrap";
    case StreamPurpose::kOmega: return "omega";
    case StreamPurpose::kSynthetic: return "synthetic";
    case StreamPurpose::kSitePairs: return "site-pairs";
    case StreamPurpose::kReferenceField: return "reference-field";
  }
  return "unknown";
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master, const StreamPath& path) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master),       hi(master),     lo(path.replica),
                    hi(path.replica), lo(path.level), hi(path.level),
                    static_cast<std::uint32_t>(path.purpose)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, StreamPath path)
    : master_seed_(master_seed), path_(path), engine_(seeded_engine(master_seed, path)) {}

double RngStream::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

std::string RngStream::describe() const {
  return "seed=" + std::to_string(master_seed_) + "/replica=" + std::to_string(path_.replica) +
         "/level=" + std::to_string(path_.level) + "/" + to_string(path_.purpose);
}

}  // namespace gmclab
