#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace witloc {

/// Deterministic random stream. Draws go through our own reductions so a
/// seed replays the same sequence on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed = 1) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform in [0, bound). bound == 0 means the full 64-bit range.
  uint64_t below(uint64_t bound) {
    if (bound == 0) return next_u64();
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  /// Index drawn proportionally to the given non-negative weights.
  /// Falls back to a uniform draw when all weights are zero.
  size_t weighted_index(std::span<const double> weights);

 private:
  std::mt19937_64 gen_;
};

}  // namespace witloc
