#pragma once

// Reproducible random number generation.
//
// Monte Carlo trials must regenerate bit-identically from (seed, trial_index)
// on any platform, so everything here is fixed-algorithm integer/double
// arithmetic with no implementation-defined parts:
//
//   splitmix64   (Steele/Lea/Flood)   - seed expansion and derivation chains
//   xoshiro256++ (Blackman/Vigna '19) - the uniform stream
//   Box-Muller                        - Gaussian variates from two uniforms
//
// std::normal_distribution and friends are deliberately not used; their
// output sequences are implementation-defined.

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace bdris {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Derives an independent stream seed from a root seed and a path of tags
/// (module tag, trial index, ...). Each path element is absorbed through one
/// splitmix64 step, so unrelated paths give statistically unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = root;
  std::uint64_t h = detail::splitmix64_next(state);
  for (std::uint64_t p : path) {
    state = h ^ p;
    h = detail::splitmix64_next(state);
  }
  return h;
}

/// xoshiro256++ stream with Box-Muller Gaussians. One instance per
/// (module, trial); never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    // Canonical seeding: four successive splitmix64 outputs.
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 significant bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_open01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (cosine branch; consumes two uniforms).
  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open01()));
    return r * std::cos(two_pi * uniform01());
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = 1
  /// (real and imaginary parts are N(0, 1/2), one Box-Muller pair).
  std::complex<double> complex_gaussian() {
    const double r = std::sqrt(-std::log(uniform_open01()));
    const double phase = two_pi * uniform01();
    return {r * std::cos(phase), r * std::sin(phase)};
  }

 private:
  static constexpr double two_pi = 6.283185307179586476925286766559;
  std::uint64_t state_[4];
};

// Stream tags for derive_seed paths (arbitrary distinct constants).
inline constexpr std::uint64_t kStreamChannel = 0x4348414EULL;   // "CHAN"
inline constexpr std::uint64_t kStreamPhiInit = 0x50484930ULL;   // "PHI0"
inline constexpr std::uint64_t kStreamTrial = 0x5452494CULL;     // "TRIL"

}  // namespace bdris
