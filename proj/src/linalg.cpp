#include "geomodel/linalg.hpp"

#include <cassert>
#include <stdexcept>

namespace geomodel {

std::vector<std::size_t> reduce_row_echelon(RationalMatrix& rows, std::size_t pivot_cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < pivot_cols && r < rows.size(); ++c) {
        std::size_t sel = r;
        while (sel < rows.size() && rows[sel][c] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        const Rational inv = 1 / rows[r][c];
        for (auto& v : rows[r]) v *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const Rational f = rows[i][c];
            for (std::size_t j = c; j < rows[i].size(); ++j)
                if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

std::size_t rank(RationalMatrix rows) {
    if (rows.empty()) return 0;
    return reduce_row_echelon(rows, rows.front().size()).size();
}

std::optional<AffineSolution> solve_affine(const RationalMatrix& a, const RationalVector& b,
                                           std::size_t cols) {
    if (a.size() != b.size()) throw std::invalid_argument("solve_affine: row count mismatch");
    RationalMatrix aug;
    aug.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != cols) throw std::invalid_argument("solve_affine: column count mismatch");
        RationalVector row = a[i];
        row.push_back(b[i]);
        aug.push_back(std::move(row));
    }
    const auto pivots = reduce_row_echelon(aug, cols);
    // A zero row with nonzero right-hand side means the system is inconsistent.
    for (std::size_t i = pivots.size(); i < aug.size(); ++i)
        if (aug[i][cols] != 0) return std::nullopt;

    AffineSolution sol;
    sol.particular.assign(cols, Rational(0));
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        sol.particular[pivots[i]] = aug[i][cols];
        is_pivot[pivots[i]] = true;
    }
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        RationalVector k(cols, Rational(0));
        k[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) k[pivots[i]] = -aug[i][free];
        sol.kernel.push_back(std::move(k));
    }
    return sol;
}

Rational dot(const RationalVector& a, const RationalVector& b) {
    assert(a.size() == b.size());
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

}  // namespace geomodel
