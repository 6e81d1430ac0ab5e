#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

// Self-contained random sampling for the trial engine.  The standard
// library's distributions are implementation-defined, so everything here is
// pinned to fixed algorithms: runs reproduce bit-for-bit across compilers.
// Each trial owns a private stream derived from (master seed, trial index),
// which keeps results independent of how trials are scheduled over threads.

namespace msense {

/// splitmix64 output scramble (also a decent standalone 64-bit mixer).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// One step of the splitmix64 sequence.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  return mix64(state += 0x9e3779b97f4a7c15ULL);
}

/// xoshiro256++ generator seeded from a (master seed, stream index) pair.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) {
    // Every stream fills its state from a private four-draw window of one
    // splitmix64 sequence, so distinct indices never share state words.
    std::uint64_t sm = mix64(master_seed) + stream_index * (4 * 0x9e3779b97f4a7c15ULL);
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Poisson count given the acceptance level exp(-mean), precomputed by the
  /// caller.  Lets constant-rate loops hoist the exponential.
  int poisson_from_level(double level) {
    int n = 0;
    double prod = uniform();
    while (prod > level) {
      ++n;
      prod *= uniform();
    }
    return n;
  }

  /// Poisson count by Knuth's product method; cheap for the sub-unity
  /// per-bin means this project produces.
  int poisson(double mean) { return poisson_from_level(std::exp(-mean)); }

  /// Standard normal via Box-Muller (partner value discarded).
  double normal() {
    double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
    return radius * std::cos(2.0 * std::numbers::pi * uniform());
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace msense
