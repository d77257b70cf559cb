#pragma once

#include <cstdint>
#include <random>

namespace scalebreak {

/// Independent, reproducible random stream identified by (seed, stream id).
///
/// Every consumer that needs randomness derives its own substream, so results
/// do not depend on the order in which trials or replicates are executed.
/// Variate generation is implemented here rather than through the
/// <random> distribution classes, whose output is library-specific.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Child stream; the same (parent, id) pair always yields the same child.
  RandomStream substream(std::uint64_t id) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Exponential with unit mean.
  double exponential();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace scalebreak
