#pragma once

#include <cstdint>
#include <random>

#include "lrsp/matrix_core.hpp"

namespace lrsp {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent child seeds from (seed, counter).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Matrix with i.i.d. N(0, stddev^2) entries, filled row-major.
Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, double stddev = 1.0);

/// Vector with i.i.d. N(0, 1) entries.
Vector gaussian_vector(Index n, Rng& rng);

}  // namespace lrsp
