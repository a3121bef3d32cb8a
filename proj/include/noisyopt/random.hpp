#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "errors.hpp"

namespace noisyopt {

// SplitMix64 finaliser. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Seed of the random stream owned by one trial.
///
/// The (cell, trial) pair is packed into a single 64-bit counter
/// `cell << 32 | trial`, offset by the mixed master seed and passed through
/// `mix64`. Addition modulo 2^64 and `mix64` are both bijections, so for a
/// fixed master seed distinct pairs always yield distinct seeds (cells and
/// trials must each stay below 2^32).
constexpr std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t cell,
                                   std::uint64_t trial) noexcept {
  const std::uint64_t key = (cell << 32) | (trial & 0xffffffffULL);
  return mix64(mix64(master_seed + kGoldenGamma) + key);
}

/// xoshiro256** generator with the samplers used by the problems and
/// algorithms. Every sampler is defined here on top of raw 64-bit draws so a
/// seed reproduces the same trajectory with any standard library.
///
/// Satisfies std::uniform_random_bit_generator.
class RandomStream {
public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += kGoldenGamma;
      word = mix64(x);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 bits of resolution. One draw.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Fair coin from the top bit of one draw.
  bool coin() noexcept { return ((*this)() >> 63) != 0; }

  /// Uniform integer in [0, bound), unbiased (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) {
    detail::require(bound > 0, "RandomStream::below: bound must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal deviate, Marsaglia polar method. The second deviate of
  /// each accepted pair is cached in the stream and returned by the next call.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace noisyopt
