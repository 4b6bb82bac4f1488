#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "geomodel/double_description.hpp"
#include "geomodel/rational.hpp"

namespace geomodel {

using Point = RationalVector;

class DimensionMismatch : public std::runtime_error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : std::runtime_error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                             std::to_string(got)) {}
};

class FacetCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// x1 ⊕ x2 ⊕ ... in order.
Point concat(const std::vector<Point>& points);

inline constexpr std::size_t kFacetDimCap = 10;
inline constexpr std::size_t kFacetVertexCap = 64;

/// Convex hull of finitely many rational points. The generating set is
/// deduplicated and sorted; an empty set is the empty region. Copies share
/// the lazily computed facet cache.
class Polytope {
public:
    Polytope() = default;
    explicit Polytope(std::size_t dim, std::vector<Point> points = {});

    std::size_t dim() const { return dim_; }
    const std::vector<Point>& vertices() const { return points_; }
    bool empty() const { return points_.empty(); }

    /// Exact membership. Uses cheap filters (bounding box, affine hull,
    /// generator match), then the facet cache if already filled, else an
    /// exact LP on convex weights.
    bool contains(const Point& p) const;

    /// Convex weights over `vertices()` expressing p, or nullopt.
    std::optional<RationalVector> convex_weights(const Point& p) const;

    /// H-representation by double description, computed once and published
    /// under a lock. Throws FacetCapExceeded beyond kFacetDimCap dimensions
    /// or kFacetVertexCap generators.
    const HalfspaceSystem& facets() const;
    bool facets_cached() const;

    /// Membership decided from the facets alone.
    bool contains_by_facets(const Point& p) const;

    /// Image of the hull under taking coordinates [begin, begin + len).
    Polytope project(std::size_t begin, std::size_t len) const;

    /// Generators that are extreme points of the hull.
    Polytope reduced() const;

    bool operator==(const Polytope& o) const { return dim_ == o.dim_ && points_ == o.points_; }

private:
    bool passes_filters(const Point& p) const;

    struct Cache {
        std::mutex mutex;
        std::shared_ptr<const HalfspaceSystem> facets;
    };

    std::size_t dim_ = 0;
    std::vector<Point> points_;
    Point lo_, hi_;
    std::vector<HalfspaceSystem::Row> affine_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace geomodel
