#pragma once

#include <cstdint>
#include <random>

namespace jumpstab {

/// Well-known stream channels of a single sample path. Every noise source of
/// a path draws from its own engine so that couplings can share exactly the
/// sources they need and nothing else.
enum class Channel : std::uint64_t {
  kBrownian1 = 0,
  kJumps1 = 1,
  kBrownian2 = 2,
  kJumps2 = 3,
  kPlant = 4,
  kInitial = 5,
  kSampling = 6,
  /// First channel index available for per-edge streams (consensus).
  kEdgeBase = 64,
};

/// SplitMix64 finalizer; used to decorrelate (seed, path, channel) triples.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Random stream of one (master seed, path index, channel) triple.
///
/// The stream is a pure function of the triple, so a path can be replayed
/// bit for bit regardless of which thread runs it or in which order.
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t path_index,
      std::uint64_t channel);
  Rng(std::uint64_t master_seed, std::uint64_t path_index, Channel channel)
      : Rng(master_seed, path_index, static_cast<std::uint64_t>(channel)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Poisson variate with the given mean; mean <= 0 returns 0 without
  /// consuming randomness.
  std::uint32_t poisson(double mean);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace jumpstab
