#include "geomodel/double_description.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

namespace geomodel {

namespace {

using Int = boost::multiprecision::mpz_int;

class Bits {
public:
    explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    void set_prefix(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) set(i);
    }
    Bits operator&(const Bits& o) const {
        Bits r = *this;
        for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= o.words_[w];
        return r;
    }
    bool contains(const Bits& o) const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if ((words_[w] & o.words_[w]) != o.words_[w]) return false;
        return true;
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct Ray {
    RationalVector v;
    Bits zero;
};

void axpy(RationalVector& y, const Rational& alpha, const RationalVector& x) {
    for (std::size_t i = 0; i < y.size(); ++i)
        if (x[i] != 0) y[i] += alpha * x[i];
}

}  // namespace

void make_primitive(RationalVector& v) {
    Int lcm_den = 1;
    for (const auto& x : v)
        if (x != 0) lcm_den = boost::multiprecision::lcm(lcm_den, Int(denominator(x)));
    Int g = 0;
    for (const auto& x : v)
        if (x != 0) g = boost::multiprecision::gcd(g, Int(numerator(x) * (lcm_den / denominator(x))));
    if (g == 0) return;
    for (auto& x : v)
        if (x != 0) x = Rational(Int(numerator(x) * (lcm_den / denominator(x))) / g);
}

ConeGenerators enumerate_cone(const RationalMatrix& inequalities, std::size_t dim,
                              std::size_t ray_limit) {
    const std::size_t m = inequalities.size();
    std::vector<RationalVector> lineality;
    for (std::size_t i = 0; i < dim; ++i) {
        RationalVector e(dim, Rational(0));
        e[i] = 1;
        lineality.push_back(std::move(e));
    }
    std::vector<Ray> rays;

    for (std::size_t c = 0; c < m; ++c) {
        const auto& a = inequalities[c];
        std::size_t pick = lineality.size();
        Rational pick_val;
        for (std::size_t i = 0; i < lineality.size(); ++i) {
            pick_val = dot(a, lineality[i]);
            if (pick_val != 0) {
                pick = i;
                break;
            }
        }
        if (pick < lineality.size()) {
            // A line crosses the new hyperplane: keep the half-line on the
            // feasible side as a ray and project everything else onto a.x = 0.
            RationalVector l0 = std::move(lineality[pick]);
            lineality.erase(lineality.begin() + static_cast<std::ptrdiff_t>(pick));
            if (pick_val < 0) {
                for (auto& x : l0) x = -x;
                pick_val = -pick_val;
            }
            for (auto& l : lineality) {
                const Rational t = dot(a, l);
                if (t != 0) axpy(l, -t / pick_val, l0);
            }
            for (auto& r : rays) {
                const Rational t = dot(a, r.v);
                if (t != 0) {
                    axpy(r.v, -t / pick_val, l0);
                    make_primitive(r.v);
                }
                r.zero.set(c);
            }
            Ray nr{l0, Bits(m)};
            make_primitive(nr.v);
            nr.zero.set_prefix(c);
            rays.push_back(std::move(nr));
            continue;
        }

        std::vector<Rational> val(rays.size());
        std::vector<std::size_t> pos, neg;
        std::vector<Ray> next;
        next.reserve(rays.size());
        for (std::size_t i = 0; i < rays.size(); ++i) {
            val[i] = dot(a, rays[i].v);
            if (val[i] > 0) {
                pos.push_back(i);
                next.push_back(rays[i]);
            } else if (val[i] < 0) {
                neg.push_back(i);
            } else {
                next.push_back(rays[i]);
                next.back().zero.set(c);
            }
        }
        const std::size_t min_common =
            dim >= lineality.size() + 2 ? dim - lineality.size() - 2 : 0;
        for (auto p : pos) {
            for (auto n : neg) {
                Bits common = rays[p].zero & rays[n].zero;
                if (common.count() < min_common) continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
                    if (r == p || r == n) continue;
                    if (rays[r].zero.contains(common)) adjacent = false;
                }
                if (!adjacent) continue;
                RationalVector w(dim, Rational(0));
                axpy(w, val[p], rays[n].v);
                axpy(w, -val[n], rays[p].v);
                make_primitive(w);
                common.set(c);
                next.push_back(Ray{std::move(w), std::move(common)});
                if (next.size() > ray_limit) throw DoubleDescriptionLimit(next.size());
            }
        }
        rays = std::move(next);
    }

    ConeGenerators out;
    out.lineality = std::move(lineality);
    for (auto& r : rays) out.rays.push_back(std::move(r.v));
    std::sort(out.rays.begin(), out.rays.end());
    out.rays.erase(std::unique(out.rays.begin(), out.rays.end()), out.rays.end());
    return out;
}

std::vector<RationalVector> enumerate_vertices(const RationalMatrix& g, const RationalVector& h,
                                               std::size_t dim, std::size_t ray_limit) {
    // Homogenise: (x0, x) with h x0 + G x >= 0 and x0 >= 0.
    RationalMatrix cone;
    cone.reserve(g.size() + 1);
    RationalVector first(dim + 1, Rational(0));
    first[0] = 1;
    cone.push_back(std::move(first));
    for (std::size_t i = 0; i < g.size(); ++i) {
        RationalVector row;
        row.reserve(dim + 1);
        row.push_back(h[i]);
        row.insert(row.end(), g[i].begin(), g[i].end());
        cone.push_back(std::move(row));
    }
    auto gens = enumerate_cone(cone, dim + 1, ray_limit);
    if (!gens.lineality.empty()) throw std::domain_error("enumerate_vertices: polyhedron contains a line");
    std::vector<RationalVector> vertices;
    for (const auto& r : gens.rays) {
        if (r[0] == 0) throw std::domain_error("enumerate_vertices: polyhedron is unbounded");
        RationalVector v(r.begin() + 1, r.end());
        for (auto& x : v) x /= r[0];
        vertices.push_back(std::move(v));
    }
    std::sort(vertices.begin(), vertices.end());
    return vertices;
}

HalfspaceSystem hull_facets(const std::vector<RationalVector>& points, std::size_t dim,
                            std::size_t ray_limit) {
    // Polar cone {(a, beta) | beta - a.v >= 0 for all v}: its lineality space
    // gives the affine hull, its extreme rays the facets.
    HalfspaceSystem out;
    if (points.empty()) {
        // Nothing lies in the hull of the empty set: 0 == 1.
        out.equations.push_back({RationalVector(dim, Rational(0)), Rational(1)});
        return out;
    }
    RationalMatrix cone;
    for (const auto& p : points) {
        RationalVector row(dim + 1);
        for (std::size_t i = 0; i < dim; ++i) row[i] = -p[i];
        row[dim] = 1;
        cone.push_back(std::move(row));
    }
    auto gens = enumerate_cone(cone, dim + 1, ray_limit);
    auto split = [dim](RationalVector v) {
        HalfspaceSystem::Row row;
        row.offset = v[dim];
        v.pop_back();
        row.normal = std::move(v);
        return row;
    };
    for (auto& l : gens.lineality) {
        make_primitive(l);
        auto row = split(std::move(l));
        out.equations.push_back(std::move(row));
    }
    for (auto& r : gens.rays) {
        auto row = split(std::move(r));
        if (std::all_of(row.normal.begin(), row.normal.end(), [](const Rational& x) { return x == 0; }))
            continue;
        out.inequalities.push_back(std::move(row));
    }
    return out;
}

}  // namespace geomodel
