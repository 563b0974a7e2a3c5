#pragma once

#include <cstdint>
#include <string_view>

#include "nbv/core/vec3.hpp"

namespace nbv {

// splitmix64: seed expander, also used to derive named sub-streams.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// xoshiro256** — deterministic across platforms, unlike std distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t uniform_index(uint64_t n) {
    // Rejection to remove modulo bias.
    const uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      const uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  Vec3 uniform_in_box(const Aabb& box) {
    return {uniform(box.lo.x, box.hi.x), uniform(box.lo.y, box.hi.y), uniform(box.lo.z, box.hi.z)};
  }

  // Uniform direction on the unit sphere.
  Vec3 uniform_direction() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 6.283185307179586);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

// One trial seed fans out into independent named streams so that consumers
// (sensor jitter, proxy sampling, surface sampling, start pose, ...) never
// share or reorder draws.
inline Rng named_stream(uint64_t trial_seed, std::string_view name) {
  uint64_t mix = trial_seed ^ fnv1a64(name);
  return Rng(splitmix64(mix));
}

inline Rng named_stream(uint64_t trial_seed, std::string_view name, uint64_t index) {
  uint64_t mix = trial_seed ^ fnv1a64(name) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return Rng(splitmix64(mix));
}

// Child seed for consumers that take a raw seed and open their own named
// streams internally; keeps those streams independent across call sites and
// loop indices.
inline uint64_t derive_seed(uint64_t trial_seed, std::string_view name, uint64_t index = 0) {
  uint64_t mix = trial_seed ^ fnv1a64(name) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64(mix);
}

}  // namespace nbv
