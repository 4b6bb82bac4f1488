#include "geomodel/polytope.hpp"

#include <algorithm>

#include "geomodel/lp.hpp"

namespace geomodel {

Point concat(const std::vector<Point>& points) {
    Point out;
    for (const auto& p : points) out.insert(out.end(), p.begin(), p.end());
    return out;
}

Polytope::Polytope(std::size_t dim, std::vector<Point> points) : dim_(dim), points_(std::move(points)) {
    for (const auto& p : points_)
        if (p.size() != dim_) throw DimensionMismatch(dim_, p.size());
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    if (points_.empty()) return;

    lo_ = hi_ = points_.front();
    for (const auto& p : points_)
        for (std::size_t i = 0; i < dim_; ++i) {
            if (p[i] < lo_[i]) lo_[i] = p[i];
            if (p[i] > hi_[i]) hi_[i] = p[i];
        }

    // Affine hull: kernel of the rows (p, -1).
    RationalMatrix rows;
    for (const auto& p : points_) {
        RationalVector r(p);
        r.push_back(-1);
        rows.push_back(std::move(r));
    }
    auto sol = solve_affine(rows, RationalVector(rows.size(), Rational(0)), dim_ + 1);
    for (auto& k : sol->kernel) {
        make_primitive(k);
        HalfspaceSystem::Row row;
        row.offset = k[dim_];
        k.pop_back();
        row.normal = std::move(k);
        affine_.push_back(std::move(row));
    }
}

bool Polytope::passes_filters(const Point& p) const {
    for (std::size_t i = 0; i < dim_; ++i)
        if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
    for (const auto& e : affine_)
        if (dot(e.normal, p) != e.offset) return false;
    return true;
}

bool Polytope::contains(const Point& p) const {
    if (p.size() != dim_) throw DimensionMismatch(dim_, p.size());
    if (points_.empty() || !passes_filters(p)) return false;
    if (std::binary_search(points_.begin(), points_.end(), p)) return true;
    if (facets_cached()) return contains_by_facets(p);
    return convex_weights(p).has_value();
}

std::optional<RationalVector> Polytope::convex_weights(const Point& p) const {
    if (p.size() != dim_) throw DimensionMismatch(dim_, p.size());
    if (points_.empty()) return std::nullopt;
    const std::size_t n = points_.size();
    RationalMatrix a(dim_ + 1, RationalVector(n, Rational(0)));
    RationalVector b(dim_ + 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < dim_; ++i) a[i][j] = points_[j][i];
        a[dim_][j] = 1;
    }
    for (std::size_t i = 0; i < dim_; ++i) b[i] = p[i];
    b[dim_] = 1;
    return solve_nonnegative(a, b, n);
}

const HalfspaceSystem& Polytope::facets() const {
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        if (cache_->facets) return *cache_->facets;
    }
    if (dim_ > kFacetDimCap || points_.size() > kFacetVertexCap)
        throw FacetCapExceeded("facet enumeration limited to dimension " + std::to_string(kFacetDimCap) +
                               " and " + std::to_string(kFacetVertexCap) + " vertices");
    // Compute outside the lock; racing threads produce identical results and
    // only the first one is published.
    auto computed = std::make_shared<const HalfspaceSystem>(hull_facets(points_, dim_));
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (!cache_->facets) cache_->facets = std::move(computed);
    return *cache_->facets;
}

bool Polytope::facets_cached() const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->facets != nullptr;
}

bool Polytope::contains_by_facets(const Point& p) const {
    if (p.size() != dim_) throw DimensionMismatch(dim_, p.size());
    const auto& h = facets();
    for (const auto& e : h.equations)
        if (dot(e.normal, p) != e.offset) return false;
    for (const auto& r : h.inequalities)
        if (dot(r.normal, p) > r.offset) return false;
    return true;
}

Polytope Polytope::project(std::size_t begin, std::size_t len) const {
    if (begin + len > dim_) throw DimensionMismatch(dim_, begin + len);
    std::vector<Point> pts;
    pts.reserve(points_.size());
    for (const auto& p : points_) pts.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(begin),
                                                  p.begin() + static_cast<std::ptrdiff_t>(begin + len));
    return Polytope(len, std::move(pts));
}

Polytope Polytope::reduced() const {
    std::vector<Point> extreme;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        std::vector<Point> others;
        for (std::size_t j = 0; j < points_.size(); ++j)
            if (j != i) others.push_back(points_[j]);
        if (!Polytope(dim_, std::move(others)).contains(points_[i])) extreme.push_back(points_[i]);
    }
    return Polytope(dim_, std::move(extreme));
}

}  // namespace geomodel
