#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace coshare {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// 64-bit FNV-1a.
constexpr std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Counter-based draw: a pure function of (seed, counter, key). Used by the
// Monte Carlo sampler so that an element's state in a replication does not
// depend on which other elements exist.
constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t counter,
                                     std::uint64_t key) {
  return mix64(mix64(seed ^ mix64(counter)) ^ key);
}

// Threshold t such that (draw < t) has probability p for a uniform 64-bit draw.
inline std::uint64_t bernoulli_threshold(double p) {
  if (p >= 1.0) return UINT64_MAX;
  if (p <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

// Named, seeded generation stream. Distinct names give independent streams
// under one scenario seed, so adding a stream never perturbs another.
class Stream {
 public:
  Stream(std::uint64_t seed, std::string_view name)
      : engine_(mix64(seed ^ hash_name(name))) {}

  // Uniform in [0, 1) with 53 random bits; portable across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace coshare
