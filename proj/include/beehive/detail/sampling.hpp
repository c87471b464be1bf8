#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace beehive::detail {

/// Draws k distinct elements uniformly from `pool`, in draw order, via a
/// partial Fisher-Yates shuffle. Consumes exactly min(k, pool.size()) rng
/// draws; does not depend on std::sample's unspecified strategy.
template <class T>
std::vector<T> pick_k(std::vector<T> pool, std::size_t k, std::mt19937_64& rng) {
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace beehive::detail
