#pragma once

#include <array>
#include <cstdint>

namespace spinconc {

/// Deterministic, platform-independent random stream: xoshiro256** 1.0,
/// state expanded from the seed with SplitMix64. Identical seeds produce
/// identical draw sequences on every platform, which is what makes Monte
/// Carlo reports reproducible.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  /// Substream for concurrent or per-trial use, derived from
  /// SplitMix64(seed ^ SplitMix64(stream + 1)). Streams with distinct
  /// indices are statistically independent.
  static RandomSource for_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), from the top 53 bits of next_u64().
  double next_unit();

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace spinconc
