#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace aoi {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of a base seed with any number of keys.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(base);
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

// Uniform on [0, 1) with 53 random bits. Portable across standard libraries,
// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Independent streams for one simulation run. Arrivals/services live on their
// own stream so that runs under different policies see identical A[t], R_n[t].
struct RunStreams {
  Rng process;
  Rng price;
  Rng policy;

  explicit RunStreams(std::uint64_t seed)
      : process(derive_seed(seed, {1})),
        price(derive_seed(seed, {2})),
        policy(derive_seed(seed, {3})) {}
};

}  // namespace aoi
