#pragma once

// Seeded random test objects shared by the checkers and the harness.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gaussig/expr.hpp"

namespace gaussig {

using Rng = std::mt19937_64;

/// Sum of monomials of total degree <= degree in `dim` variables, each with a
/// coefficient uniform in [-scale, scale].
Expr random_polynomial(Rng& rng, std::size_t dim, unsigned degree, double scale = 1.0);

/// Uniform in [lo, hi].
double uniform(Rng& rng, double lo, double hi);

}  // namespace gaussig
