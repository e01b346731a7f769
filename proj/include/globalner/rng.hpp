#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace globalner {

// Deterministic sampling helpers on top of std::mt19937_64. The standard
// <random> distributions are implementation-defined, so everything that has
// to reproduce bit-for-bit across toolchains goes through these instead.

// Uniform double in [0, 1).
inline double rand_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). n must be > 0.
inline std::size_t rand_index(std::mt19937_64& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(rand_unit(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

// Standard normal via Box-Muller.
inline double rand_normal(std::mt19937_64& rng) {
  double u1 = rand_unit(rng);
  while (u1 <= 0.0) u1 = rand_unit(rng);
  double u2 = rand_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rand_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

// Samples an index with probability proportional to weights[i].
// Falls back to the last positive-weight index on rounding spill.
inline std::size_t rand_weighted(std::mt19937_64& rng,
                                 const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rand_unit(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace globalner
