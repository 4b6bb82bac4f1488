#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "geomodel/chase.hpp"
#include "geomodel/polytope.hpp"
#include "geomodel/rules.hpp"

namespace geomodel {

class UnknownObject : public std::runtime_error {
public:
    explicit UnknownObject(const std::string& name) : std::runtime_error("object " + name + " has no point") {}
};

class NameCollision : public std::runtime_error {
public:
    explicit NameCollision(const std::string& name)
        : std::runtime_error("object " + name + " already has a point") {}
};

class NotProp3Base : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RoundsExceeded : public std::runtime_error {
public:
    explicit RoundsExceeded(std::size_t rounds)
        : std::runtime_error("witness synthesis did not settle within " + std::to_string(rounds) + " rounds") {}
};

using EntityMap = std::map<Term, Point, ObjectOrder>;

/// Points for objects in R^m and a convex region in R^{k m} per k-ary
/// relation. Relations without a region entry are empty.
struct GeometricInterpretation {
    std::size_t m = 0;
    EntityMap entities;
    std::map<std::string, std::size_t> arities;
    std::map<std::string, Polytope> regions;

    /// Region of `relation`, or an empty polytope of the right dimension.
    Polytope region(const std::string& relation) const;
    std::vector<Term> objects() const;
};

/// η(o1) ⊕ ... ⊕ η(ok) ∈ η(R).
bool satisfies_atom(const GeometricInterpretation& eta, const Atom& atom);

/// All ground atoms over `objects` satisfied by `eta`. Auxiliary relations
/// introduced by head normalisation are omitted unless requested.
/// Candidates for each argument position are prefiltered by the projection
/// of the region onto that position; tuples are checked in parallel.
Interpretation phi(const GeometricInterpretation& eta, const std::vector<Term>& objects,
                   bool include_auxiliary = false);
Interpretation phi(const GeometricInterpretation& eta);

/// Reference enumeration of every tuple, single-threaded and unfiltered.
Interpretation phi_serial(const GeometricInterpretation& eta, const std::vector<Term>& objects,
                          bool include_auxiliary = false);

/// Objects sorted constants-first, the i-th mapped to the i-th unit vector,
/// and each region the hull of the concatenated points of its atoms.
/// `extra_objects` adds objects without atoms; `arities` declares relations
/// that get an empty region.
GeometricInterpretation build_prop3_model(const Interpretation& model, const std::set<Term>& extra_objects = {},
                                          const std::map<std::string, std::size_t>& arities = {});

/// Adds fresh objects at the given points; regions are unchanged.
GeometricInterpretation extend_with_points(const GeometricInterpretation& eta, const EntityMap& points);

inline constexpr std::size_t kDefaultWitnessRounds = 1000;

/// Report of the nulls created by `synthesize_null_witnesses`.
struct WitnessSynthesis {
    GeometricInterpretation eta;
    /// Created null and the convex weights over base matches used for it.
    std::vector<std::pair<Term, RationalVector>> created;
    std::size_t rounds = 0;
};

/// For every existential rule instance over `eta` whose head is not yet
/// satisfied, writes the body tuple as a convex combination of body matches
/// in `base` (weights found by LP), and adds fresh nulls placed at the same
/// combination of the first head witnesses of those matches. Repeats until
/// no demand is left. Throws NotProp3Base if a body tuple is not such a
/// combination and RoundsExceeded after `max_rounds` rounds.
WitnessSynthesis synthesize_null_witnesses(const GeometricInterpretation& eta, const Interpretation& base,
                                           const KnowledgeBase& kb, std::size_t max_rounds = kDefaultWitnessRounds);

/// Moves a unit-vector model onto the hyperplane chart that drops the last
/// coordinate. Throws NotProp3Base unless every entity point and every block
/// of every region generator has coordinates summing to one.
GeometricInterpretation compact_datalog_model(const GeometricInterpretation& eta);

/// Lookup-table model: entity i on the line at i, f_R(x) = 1 iff x is the
/// point tuple of an atom of the model, region {1}.
struct ExtendedGeometricInterpretation {
    std::map<Term, Rational, ObjectOrder> entities;
    std::map<std::string, std::size_t> arities;
    std::map<std::string, std::set<RationalVector>> table;

    Rational transform(const std::string& relation, const RationalVector& x) const;
    bool satisfies_atom(const Atom& atom) const;
    Interpretation phi() const;
};

ExtendedGeometricInterpretation build_extended_trivial(const Interpretation& model);

/// `{"m", "entities", "relations": {R: {"arity", "vertices"}}}` with
/// rationals written as strings.
std::string dump_geometry_json(const GeometricInterpretation& eta);
GeometricInterpretation load_geometry_json(const std::string& text);

}  // namespace geomodel
