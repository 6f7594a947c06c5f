#pragma once

#include <array>
#include <cstdint>

namespace corrsync {

/// Seedable, splittable generator: xoshiro256** whose 256-bit state is
/// filled from a SplitMix64 stream. `split(key)` derives an independent child
/// stream from the parent seed and a key without advancing the parent, so
/// (seed, frame, step) tuples map to fixed streams regardless of call order.
///
/// Gaussian samples use the Box-Muller transform on 53-bit uniforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  double normal();

  Rng split(std::uint64_t key) const;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);
/// Stateless 64-bit mix (the SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

}  // namespace corrsync
