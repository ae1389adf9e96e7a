#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sparsekm {

// xoshiro256++ with splitmix64 seeding. Chosen over std::mt19937_64 because
// the normal() output stays bit-identical across standard libraries (the
// std distributions do not guarantee that).
//
// Stream splitting: derive(seed, stream, substream) hashes the triple through
// splitmix64, so replication r of grid cell g gets an independent stream via
// derive(base_seed, g, r) and never overlaps the parent sequence.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
  }

  static Rng derive(uint64_t seed, uint64_t stream, uint64_t substream = 0) {
    uint64_t x = seed;
    uint64_t a = splitmix64(x);
    x ^= stream + 0x9e3779b97f4a7c15ULL;
    uint64_t b = splitmix64(x);
    x ^= substream + 0xbf58476d1ce4e5b9ULL;
    uint64_t c = splitmix64(x);
    return Rng(a ^ rotl(b, 17) ^ rotl(c, 31));
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Marsaglia polar; second deviate cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

  // Uniform integer in [0, n) by rejection, unbiased.
  int uniform_int(int n) {
    const uint64_t bound = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % bound);
  }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<uint64_t, 4> state_{};
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace sparsekm
