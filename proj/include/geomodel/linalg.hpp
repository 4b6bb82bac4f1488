#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "geomodel/rational.hpp"

namespace geomodel {

/// Dense row-major matrix of rationals; every row has the same length.
using RationalMatrix = std::vector<RationalVector>;

/// Solution set {particular + kernel * t | t free} of a linear system.
struct AffineSolution {
    RationalVector particular;
    std::vector<RationalVector> kernel;
};

/// Reduces `rows` (augmented or not) to reduced row echelon form in place and
/// returns the pivot column of each nonzero row. Only the first `pivot_cols`
/// columns are eligible as pivots.
std::vector<std::size_t> reduce_row_echelon(RationalMatrix& rows, std::size_t pivot_cols);

std::size_t rank(RationalMatrix rows);

/// Solves A x = b exactly over `cols` unknowns. Returns nullopt when the
/// system is inconsistent.
std::optional<AffineSolution> solve_affine(const RationalMatrix& a, const RationalVector& b,
                                           std::size_t cols);

Rational dot(const RationalVector& a, const RationalVector& b);

}  // namespace geomodel
