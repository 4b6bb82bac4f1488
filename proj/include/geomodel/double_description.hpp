#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "geomodel/linalg.hpp"

namespace geomodel {

/// Raised when the intermediate ray set of a double description run grows
/// beyond the configured limit.
class DoubleDescriptionLimit : public std::runtime_error {
public:
    explicit DoubleDescriptionLimit(std::size_t rays)
        : std::runtime_error("double description exceeded ray limit (" + std::to_string(rays) +
                             " rays)") {}
};

/// Generators of a polyhedral cone: extreme rays (modulo the lineality space)
/// plus a basis of the lineality space.
struct ConeGenerators {
    std::vector<RationalVector> rays;
    std::vector<RationalVector> lineality;
};

inline constexpr std::size_t kDefaultRayLimit = 50000;

/// Motzkin's double description method for {x in R^dim | A x >= 0}, with the
/// combinatorial adjacency test. Rays are returned as primitive integer
/// vectors in a deterministic order.
ConeGenerators enumerate_cone(const RationalMatrix& inequalities, std::size_t dim,
                              std::size_t ray_limit = kDefaultRayLimit);

/// Vertices of the bounded polyhedron {x in R^dim | G x + h >= 0}. Throws
/// std::domain_error if the polyhedron is unbounded; an empty result means the
/// polyhedron is empty.
std::vector<RationalVector> enumerate_vertices(const RationalMatrix& g, const RationalVector& h,
                                               std::size_t dim,
                                               std::size_t ray_limit = kDefaultRayLimit);

/// Facet description of conv(points): every point x of the hull satisfies
/// normal . x == offset for each equation and normal . x <= offset for each
/// inequality, and nothing outside the hull satisfies all of them.
struct HalfspaceSystem {
    struct Row {
        RationalVector normal;
        Rational offset;
    };
    std::vector<Row> equations;
    std::vector<Row> inequalities;
};

HalfspaceSystem hull_facets(const std::vector<RationalVector>& points, std::size_t dim,
                            std::size_t ray_limit = kDefaultRayLimit);

/// Scales a nonzero vector to the primitive integer vector in the same direction.
void make_primitive(RationalVector& v);

}  // namespace geomodel
