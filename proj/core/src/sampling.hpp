#pragma once

// Internal helpers shared by the sampled estimators.

#include <cstddef>
#include <random>

#include "equilex/point.hpp"

namespace equilex::detail {

using Rng = std::mt19937_64;

inline Point gaussian_point(Rng& rng, std::size_t dim, std::size_t active) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Point p(dim);
  for (std::size_t i = 0; i < active; ++i) p[i] = normal(rng);
  return p;
}

inline Point gaussian_point(Rng& rng, std::size_t dim) {
  return gaussian_point(rng, dim, dim);
}

}  // namespace equilex::detail
