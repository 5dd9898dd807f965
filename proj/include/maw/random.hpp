#pragma once

// Seeding rules shared by every stochastic component.
//
// A run with seed s draws from independent std::mt19937_64 streams, one per
// purpose, each seeded with splitmix64(s ^ splitmix64(stream tag)). Bounded
// draws use rejection sampling on the raw 64-bit output so the sequence is
// identical across standard library implementations.

#include <cstdint>
#include <random>

namespace maw {

using Rng = std::mt19937_64;

enum class Stream : std::uint64_t {
  Noise = 1,
  Start = 2,
  TieBreak = 3,
  Walk = 4,
  Monitor = 5,
  Generator = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return Rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))));
}

// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v > limit);
  return v % n;
}

// Uniform double in [0, 1).
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace maw
