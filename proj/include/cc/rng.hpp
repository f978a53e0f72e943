#pragma once

#include <cstdint>

namespace cc {

// SplitMix64 finalizer. Bijective on 64-bit words; used both as the
// stream generator step and as the counter-mode hash for projection
// entries, so every draw is a pure function of (seed, position).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Combine a seed with up to two counter words into one hashed word.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t c0,
                                     std::uint64_t c1 = 0) noexcept {
  std::uint64_t h = mix64(seed ^ 0x2545f4914f6cdd1dULL);
  h = mix64(h ^ c0);
  h = mix64(h ^ c1);
  return h;
}

// Map 64 random bits to the open interval (0,1). The +0.5 offset keeps
// both endpoints strictly excluded.
constexpr double unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Deterministic uniform stream: identical seed + position gives the
// identical sequence on every platform.
struct SeededGenerator {
  std::uint64_t seed = 0;
  std::uint64_t pos = 0;

  explicit SeededGenerator(std::uint64_t s = 0) : seed(s) {}

  std::uint64_t next_bits() noexcept { return counter_hash(seed, pos++); }
  double next_uniform() noexcept { return unit_open(next_bits()); }
};

// Seed for trial t of a campaign keyed by a master seed. Fixed derivation
// so serial and worker-pool runs aggregate identically.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t t) noexcept {
  return mix64(master ^ mix64(t + 0x517cc1b727220a95ULL));
}

}  // namespace cc
