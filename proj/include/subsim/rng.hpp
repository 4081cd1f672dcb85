#pragma once

#include <cstdint>

namespace subsim {

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// bit-identical regardless of the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53-bit resolution.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0,1]; safe as an argument to log().
  double uniform_pos() { return 1.0 - uniform(); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Per-trajectory stream: seed = splitmix64 chain over (base_seed, index).
// Documented in the README so other implementations can reproduce streams.
inline Rng trajectory_rng(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t x = base_seed ^ (0x9E3779B97F4A7C15ull * (index + 1));
  std::uint64_t a = Rng::splitmix64(x);
  std::uint64_t b = Rng::splitmix64(x);
  return Rng(a ^ (b << 1) ^ index);
}

}  // namespace subsim
