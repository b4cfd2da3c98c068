#pragma once

#include <cstdint>
#include <random>

#include "comodule/types.hpp"

namespace comodule {

/// splitmix64 finalizer; mixes a seed with a stream index so that
/// per-restart / per-run / per-draw generators are independent yet
/// reproducible regardless of execution order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64(mix_seed(seed, stream));
}

/// Fills a vector with i.i.d. standard normal draws.
inline Vector normal_vector(std::mt19937_64& rng, Index len) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector out(len);
  for (Index i = 0; i < len; ++i) out[i] = dist(rng);
  return out;
}

/// Fills a matrix row-major with i.i.d. standard normal draws.
inline Matrix normal_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = dist(rng);
  return out;
}

}  // namespace comodule
