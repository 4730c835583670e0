#pragma once

#include <cstdint>
#include <random>

namespace rost {

/// splitmix64 finalizer; used to decorrelate user seeds before they reach the engine.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic generator with platform-independent draws.
///
/// The std:: distributions are implementation-defined, so uniform reals and
/// bounded integers are derived from the raw 64-bit engine output here. Two
/// generators built from the same (seed, stream) pair produce identical
/// sequences on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix_seed(seed ^ mix_seed(stream + 0x5851f42d4c957f2dULL))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Rejection on the top of the range keeps the draw exactly uniform.
    const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Independent child generator; same parent state and id give the same child.
  Rng split(std::uint64_t stream_id) { return Rng(next_u64(), stream_id); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rost
