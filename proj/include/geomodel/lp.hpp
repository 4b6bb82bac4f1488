#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "geomodel/linalg.hpp"

namespace geomodel {

/// Exact feasibility of {x | A x = b, x >= 0}, decided by a phase-one simplex
/// over rationals with Bland's pivoting rule (so it always terminates).
/// Returns a feasible point, or nullopt when the system has no solution.
std::optional<RationalVector> solve_nonnegative(const RationalMatrix& a, const RationalVector& b,
                                                std::size_t cols);

/// Incremental builder for equality systems mixing sign-constrained and free
/// unknowns. Free unknowns are split into a difference of two nonnegative
/// columns before handing the system to `solve_nonnegative`.
class FeasibilityProblem {
public:
    std::size_t add_nonnegative();
    std::size_t add_free();
    std::size_t num_variables() const { return free_.size(); }

    /// Adds sum_k coeffs[k].second * x[coeffs[k].first] = rhs.
    void add_equality(std::vector<std::pair<std::size_t, Rational>> coeffs, Rational rhs);

    /// Values of all unknowns in declaration order, or nullopt if infeasible.
    std::optional<RationalVector> solve() const;

private:
    std::vector<bool> free_;
    std::vector<std::vector<std::pair<std::size_t, Rational>>> rows_;
    RationalVector rhs_;
};

}  // namespace geomodel
