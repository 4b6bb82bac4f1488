#include "geomodel/lp.hpp"

#include <stdexcept>

namespace geomodel {

std::optional<RationalVector> solve_nonnegative(const RationalMatrix& a, const RationalVector& b,
                                                std::size_t cols) {
    const std::size_t m = a.size();
    if (b.size() != m) throw std::invalid_argument("solve_nonnegative: row count mismatch");
    if (m == 0) return RationalVector(cols, Rational(0));

    // Tableau columns: [0, cols) structural, [cols, cols + m) artificial, last = rhs.
    const std::size_t width = cols + m + 1;
    const std::size_t rhs = width - 1;
    RationalMatrix t(m, RationalVector(width, Rational(0)));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].size() != cols) throw std::invalid_argument("solve_nonnegative: ragged matrix");
        const bool flip = b[i] < 0;
        for (std::size_t j = 0; j < cols; ++j) t[i][j] = flip ? Rational(-a[i][j]) : a[i][j];
        t[i][rhs] = flip ? Rational(-b[i]) : b[i];
        t[i][cols + i] = 1;
        basis[i] = cols + i;
    }
    // Phase-one objective: minimise the sum of artificials. `cost` holds
    // reduced costs; cost[rhs] is minus the current objective value.
    RationalVector cost(width, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (t[i][j] != 0) cost[j] -= t[i][j];
    for (std::size_t i = 0; i < m; ++i) cost[rhs] -= t[i][rhs];

    while (true) {
        std::size_t enter = width;
        for (std::size_t j = 0; j + 1 < width; ++j)
            if (cost[j] < 0) { enter = j; break; }
        if (enter == width) break;

        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= 0) continue;
            Rational ratio = t[i][rhs] / t[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = std::move(ratio);
            }
        }
        // Phase one is bounded below by zero, so an entering column always has
        // a positive entry.
        if (leave == m) throw std::logic_error("solve_nonnegative: unbounded phase one");

        const Rational inv = 1 / t[leave][enter];
        for (auto& v : t[leave])
            if (v != 0) v *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || t[i][enter] == 0) continue;
            const Rational f = t[i][enter];
            for (std::size_t j = 0; j < width; ++j)
                if (t[leave][j] != 0) t[i][j] -= f * t[leave][j];
        }
        if (cost[enter] != 0) {
            const Rational f = cost[enter];
            for (std::size_t j = 0; j < width; ++j)
                if (t[leave][j] != 0) cost[j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    if (cost[rhs] != 0) return std::nullopt;
    RationalVector x(cols, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < cols) x[basis[i]] = t[i][rhs];
    return x;
}

std::size_t FeasibilityProblem::add_nonnegative() {
    free_.push_back(false);
    return free_.size() - 1;
}

std::size_t FeasibilityProblem::add_free() {
    free_.push_back(true);
    return free_.size() - 1;
}

void FeasibilityProblem::add_equality(std::vector<std::pair<std::size_t, Rational>> coeffs,
                                      Rational rhs) {
    for (const auto& [var, c] : coeffs)
        if (var >= free_.size()) throw std::out_of_range("FeasibilityProblem: unknown variable");
    rows_.push_back(std::move(coeffs));
    rhs_.push_back(std::move(rhs));
}

std::optional<RationalVector> FeasibilityProblem::solve() const {
    std::vector<std::size_t> column(free_.size());
    std::size_t cols = 0;
    for (std::size_t v = 0; v < free_.size(); ++v) {
        column[v] = cols;
        cols += free_[v] ? 2 : 1;
    }
    RationalMatrix a(rows_.size(), RationalVector(cols, Rational(0)));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (const auto& [var, c] : rows_[i]) {
            a[i][column[var]] += c;
            if (free_[var]) a[i][column[var] + 1] -= c;
        }
    }
    auto x = solve_nonnegative(a, rhs_, cols);
    if (!x) return std::nullopt;
    RationalVector out(free_.size());
    for (std::size_t v = 0; v < free_.size(); ++v)
        out[v] = free_[v] ? Rational((*x)[column[v]] - (*x)[column[v] + 1]) : (*x)[column[v]];
    return out;
}

}  // namespace geomodel
