#pragma once

// Seeded random points of the open simplex Delta+_{g,n} with rational entries.

#include "flatvol/rational.hpp"
#include "flatvol/weight_vector.hpp"

#include <random>
#include <vector>

namespace flatvol {

using Rng = std::mt19937_64;

/// Positive entries with common denominator `denominator` summing to 2g-2+n.
/// Points with an integral entry are rejected unless allow_integral is set.
WeightVector random_point(Rng& rng, int genus, int n, long denominator,
                          bool allow_integral = false);

/// Like random_point with the denominator drawn from a fixed list of primes.
WeightVector random_point(Rng& rng, int genus, int n);

/// A point whose entry at a random position is a positive integer.
WeightVector random_integral_point(Rng& rng, int genus, int n);

/// A uniformly random permutation of 0..n-1.
std::vector<int> random_permutation(Rng& rng, int n);

}  // namespace flatvol
