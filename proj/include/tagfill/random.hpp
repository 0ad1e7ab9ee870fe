#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace tagfill {

using Rng = std::mt19937_64;

// Uniform index in [0, n) drawn the same way on every standard library
// (std::uniform_int_distribution is implementation-defined).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Fisher-Yates with uniform_index, for platform-stable visiting orders.
inline void seeded_shuffle(std::vector<std::size_t>& order, Rng& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_index(rng, i)]);
  }
}

inline std::vector<std::size_t> iota_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  return order;
}

// Independent stream per (seed, salt) pair.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return Rng(seq);
}

}  // namespace tagfill
