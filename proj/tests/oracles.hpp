#pragma once

// Independent brute-force reference implementations used by the tests. None
// of them share code paths with the library beyond the plain data types.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geomodel/rules.hpp"

namespace oracle {

using geomodel::Atom;
using geomodel::Term;

// Tries every permutation of the body.
inline bool quasi_chained_by_permutation(const std::vector<Atom>& body) {
    std::vector<std::size_t> idx(body.size());
    std::iota(idx.begin(), idx.end(), 0);
    do {
        std::set<std::string> seen;
        bool ok = true;
        for (auto i : idx) {
            std::size_t shared = 0;
            for (const auto& v : body[i].variables()) shared += seen.count(v);
            if (shared > 1) { ok = false; break; }
            const auto vs = body[i].variables();
            seen.insert(vs.begin(), vs.end());
        }
        if (ok) return true;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return false;
}

using Assignment = std::map<std::string, Term>;

inline Atom ground(const Atom& a, const Assignment& s) {
    Atom out = a;
    for (auto& t : out.args)
        if (t.is_variable()) {
            auto it = s.find(t.name);
            if (it != s.end()) t = it->second;
        }
    return out;
}

inline std::set<Term> objects_of(const std::set<Atom>& atoms) {
    std::set<Term> out;
    for (const auto& a : atoms) out.insert(a.args.begin(), a.args.end());
    return out;
}

// Calls `visit` for every assignment of `vars` over `domain`; stops when
// `visit` returns false.
inline void for_each_assignment(const std::vector<std::string>& vars, const std::vector<Term>& domain,
                                const std::function<bool(const Assignment&)>& visit) {
    Assignment s;
    std::function<bool(std::size_t)> rec = [&](std::size_t i) {
        if (i == vars.size()) return visit(s);
        for (const auto& o : domain) {
            s[vars[i]] = o;
            if (!rec(i + 1)) return false;
        }
        return true;
    };
    rec(0);
}

inline std::vector<std::string> vars_of(const std::vector<Atom>& atoms) {
    std::set<std::string> vs;
    for (const auto& a : atoms)
        for (const auto& v : a.variables()) vs.insert(v);
    return {vs.begin(), vs.end()};
}

// Every grounding of `body` over the objects of `atoms` plus `extra` that
// lands inside `atoms`.
inline std::vector<Assignment> groundings(const std::vector<Atom>& body, const std::set<Atom>& atoms,
                                          const std::set<Term>& extra = {}) {
    auto objs = objects_of(atoms);
    objs.insert(extra.begin(), extra.end());
    for (const auto& a : body)
        for (const auto& t : a.args)
            if (!t.is_variable()) objs.insert(t);
    std::vector<Term> domain(objs.begin(), objs.end());
    std::vector<Assignment> out;
    for_each_assignment(vars_of(body), domain, [&](const Assignment& s) {
        for (const auto& b : body)
            if (!atoms.count(ground(b, s))) return true;
        out.push_back(s);
        return true;
    });
    return out;
}

// Naive least fixpoint of datalog rules with conjunctive heads.
inline std::set<Atom> naive_multi_head_fixpoint(const std::vector<geomodel::ExistentialRule>& rules,
                                                std::set<Atom> facts) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : rules)
            for (const auto& s : groundings(r.body, facts))
                for (const auto& h : r.head) changed |= facts.insert(ground(h, s)).second;
    }
    return facts;
}

// Classical model check by enumerating every assignment over the domain.
inline bool is_model(const std::set<Atom>& m, const geomodel::KnowledgeBase& kb) {
    for (const auto& f : kb.database)
        if (!m.count(f)) return false;
    auto objs = objects_of(m);
    std::vector<Term> domain(objs.begin(), objs.end());
    for (const auto& c : kb.ontology.constraints)
        if (!groundings(c.body, m).empty()) return false;
    for (const auto& r : kb.ontology.rules) {
        std::vector<std::string> ev(r.evars.begin(), r.evars.end());
        for (const auto& s : groundings(r.body, m)) {
            bool found = false;
            for_each_assignment(ev, domain, [&](const Assignment& t) {
                Assignment full = s;
                for (const auto& [k, v] : t) full[k] = v;
                found = std::all_of(r.head.begin(), r.head.end(),
                                    [&](const Atom& h) { return m.count(ground(h, full)) > 0; });
                return !found;
            });
            if (!found) return false;
        }
    }
    return true;
}

}  // namespace oracle

#include "geomodel/rational.hpp"

namespace oracle {

using geomodel::Rational;
using geomodel::RationalVector;

// Solves the square or overdetermined system A x = b by Gaussian elimination.
// Returns nothing unless the solution exists and is unique.
inline std::optional<RationalVector> unique_solution(std::vector<RationalVector> a, RationalVector b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::size_t r = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) return std::nullopt;  // free column
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const Rational f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivots.push_back(c);
        ++r;
    }
    if (pivots.size() != cols) return std::nullopt;
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    RationalVector x(cols);
    for (std::size_t i = 0; i < cols; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Carathéodory: x is in the hull iff it is a convex combination of some
// affinely independent subset of at most dim + 1 points.
inline bool hull_contains(const std::vector<RationalVector>& pts, const RationalVector& x) {
    const std::size_t n = pts.size();
    const std::size_t dim = x.size();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::size_t> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) sub.push_back(i);
        if (sub.size() > dim + 1) continue;
        std::vector<RationalVector> a(dim + 1, RationalVector(sub.size()));
        RationalVector b(x);
        b.push_back(1);
        for (std::size_t j = 0; j < sub.size(); ++j) {
            for (std::size_t i = 0; i < dim; ++i) a[i][j] = pts[sub[j]][i];
            a[dim][j] = 1;
        }
        auto lam = unique_solution(a, b);
        if (lam && std::all_of(lam->begin(), lam->end(), [](const Rational& l) { return l >= 0; })) return true;
    }
    return false;
}

}  // namespace oracle
