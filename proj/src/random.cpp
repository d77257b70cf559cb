#include "scalebreak/random.hpp"

#include <cmath>

#include "scalebreak/errors.hpp"

namespace scalebreak {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RandomStream RandomStream::substream(std::uint64_t id) const {
  return RandomStream(seed_, splitmix64(stream_id_ ^ splitmix64(id + 0x632BE59BD9B4E019ULL)));
}

double RandomStream::uniform() {
  // 53 random bits shifted off zero: (k + 0.5) / 2^53.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  // Marsaglia polar method; the second variate is discarded.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s < 1.0 && s > 0.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double RandomStream::exponential() { return -std::log(uniform()); }

std::uint64_t RandomStream::below(std::uint64_t bound) {
  if (bound == 0) {
    throw InvalidInput("random integer bound must be positive");
  }
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = (~std::uint64_t{0} - bound + 1) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= limit) {
      return r % bound;
    }
  }
}

}  // namespace scalebreak
