#pragma once

#include <cmath>
#include <cstdint>

namespace mobsense {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: each draw is a pure function of
// (seed, stream, substream, counter). Streams are keyed per participant and
// purpose, so dropping one participant never shifts another's values.
struct CounterRng {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t substream = 0;
  std::uint64_t counter = 0;

  std::uint64_t next_u64() {
    return mix64(mix64(mix64(mix64(seed) ^ stream) ^ substream) ^ counter++);
  }

  // [0, 1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_unit() < p; }

  std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  double next_normal() {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Knuth's method; fine for small means.
  int next_poisson(double lambda) {
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_unit();
    } while (p > limit);
    return k - 1;
  }
};

}  // namespace mobsense
