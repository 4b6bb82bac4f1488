#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "geomodel/linalg.hpp"
#include "geomodel/polytope.hpp"

namespace geomodel {

class UnknownEntity : public std::runtime_error {
public:
    explicit UnknownEntity(const std::string& name) : std::runtime_error("entity " + name + " has no embedding") {}
};

class UnknownRelation : public std::runtime_error {
public:
    explicit UnknownRelation(const std::string& name)
        : std::runtime_error("relation " + name + " has no parameters") {}
};

// Scoring functions. Lower scores are more plausible and a pair (e, f)
// belongs to the region of a relation when score(e, f) <= lambda.

enum class Distance {
    L1,
    SquaredL2,
};

/// TransE when `head_map` and `tail_map` are absent: score d(e + r, f).
/// STransE otherwise: d(M_h e + r, M_t f).
struct TranslationRelation {
    RationalVector r;
    Rational lambda;
    std::optional<RationalMatrix> head_map;
    std::optional<RationalMatrix> tail_map;
    Distance distance = Distance::L1;
};

/// RESCAL: score -e^T M f. DistMult and ComplEx are special cases built by
/// the helpers below.
struct BilinearRelation {
    RationalMatrix m;
    Rational lambda;
};

using Relation = std::variant<TranslationRelation, BilinearRelation>;

BilinearRelation distmult(const RationalVector& r, Rational lambda);

/// ComplEx relation re + i im acting on complex embeddings written as
/// (real parts, imaginary parts); the score -Re<e, r, conj(f)> becomes a
/// bilinear form with block matrix [[diag(re), diag(im)], [-diag(im), diag(re)]].
BilinearRelation complex_relation(const RationalVector& re, const RationalVector& im, Rational lambda);
RationalVector complex_embedding(const RationalVector& re, const RationalVector& im);

Rational score(const Relation& relation, const RationalVector& e, const RationalVector& f);
bool in_region(const Relation& relation, const RationalVector& e, const RationalVector& f);

/// e^T M f.
Rational bilinear_form(const RationalMatrix& m, const RationalVector& e, const RationalVector& f);

/// sum_i a_i b_i c_i.
Rational trilinear(const RationalVector& a, const RationalVector& b, const RationalVector& c);

/// SimplE gives every entity a head and a tail vector.
struct SimplEEntity {
    RationalVector head;
    RationalVector tail;
};

/// SimplE relation with forward vector r and inverse vector ri. A pair
/// (e, f) is in the region when -<e_h, r, f_t> <= lambda_r and
/// -<f_h, ri, e_t> <= lambda_ri.
struct SimplERelation {
    RationalVector r;
    RationalVector ri;
    Rational lambda_r;
    Rational lambda_ri;
};

/// -(<e_h, r, f_t> + <f_h, ri, e_t>) / 2.
Rational score(const SimplERelation& relation, const SimplEEntity& e, const SimplEEntity& f);
bool in_region(const SimplERelation& relation, const SimplEEntity& e, const SimplEEntity& f);

struct Triple {
    std::string head;
    std::string relation;
    std::string tail;
    auto operator<=>(const Triple&) const = default;
};

std::string to_string(const Triple& t);

struct SeparationResult {
    bool ok = true;
    /// First triple in `positive` outside its region, else first triple of
    /// `negative` inside it.
    std::optional<Triple> failure;
    explicit operator bool() const { return ok; }
};

/// Every positive triple scores <= lambda and every negative one > lambda.
SeparationResult separates(const std::map<std::string, RationalVector>& embedding,
                           const std::map<std::string, Relation>& relations, const std::set<Triple>& positive,
                           const std::set<Triple>& negative);

// Necessary conditions on graphs captured by translation models.

enum class GraphProperty {
    ReflexiveNotSymmetric,
    ReflexiveNotTransitive,
    PartialSaturation,
};

std::string to_string(GraphProperty p);

struct GraphViolation {
    std::string relation;
    GraphProperty property;
    /// Entities exhibiting the failure: (s, t) for symmetry, (s, t, u) for
    /// transitivity, (e, f) for saturation.
    std::vector<std::string> entities;
    bool operator==(const GraphViolation&) const = default;
};

/// Checks, for each relation R over `subset` S:
///  - if R(s, s) for all s in S, then R is symmetric and transitive on S;
///  - if some entity e has R(e, s) for all s in S and another entity f has
///    R(f, s) for some s in S, then f has R(f, s) for all s in S.
/// An empty result means the graph passes both conditions.
std::vector<GraphViolation> translation_graph_properties(const std::set<Triple>& graph,
                                                         const std::set<std::string>& subset);

// Subsumption R(X, Y) -> S(X, Y) between bilinear relations. Here the
// thresholds bound the bilinear form from below: the region of (M, lambda)
// is {e ⊕ f | e^T M f >= lambda}, so lambda is the negated score threshold.

struct BilinearDecision {
    enum class Kind { Satisfied, Counterexample };
    enum class Reason {
        /// M_r = alpha M_s with alpha > 0 and lambda_r / alpha >= lambda_s.
        Proportional,
        /// M_r = 0 and lambda_r > 0.
        BodyUnsatisfiable,
        /// M_s = 0 and lambda_s <= 0.
        HeadTrivial,
        /// Not applicable (counterexample).
        None,
    };
    Kind kind = Kind::Satisfied;
    Reason reason = Reason::None;
    /// Factor with M_r = alpha M_s, when one exists.
    std::optional<Rational> alpha;
    /// e^T M_r f >= lambda_r and e^T M_s f < lambda_s (Counterexample only).
    RationalVector e;
    RationalVector f;
    /// Name of the construction that produced the counterexample.
    std::string construction;

    bool satisfied() const { return kind == Kind::Satisfied; }
};

std::string to_string(BilinearDecision::Reason r);

/// Decides the subsumption exactly. Counterexamples come from explicit
/// constructions on single matrix entries (unit vector on one side, two
/// loaded coordinates on the other), with a search over linear slices
/// covering patterns those constructions miss. Every counterexample is
/// re-verified exactly before it is returned.
BilinearDecision bilinear_rule_decision(const RationalMatrix& mr, const Rational& lambda_r, const RationalMatrix& ms,
                                        const Rational& lambda_s);

/// Rational with M = alpha M_s, if one exists (alpha may be zero or negative).
std::optional<Rational> proportionality_factor(const RationalMatrix& m, const RationalMatrix& ms);

struct FalsificationReport {
    std::size_t samples = 0;
    /// Exactly confirmed samples with body true and head false.
    std::size_t violations = 0;
    std::optional<std::pair<RationalVector, RationalVector>> first_violation;
};

/// Samples random (e, f) in double precision and confirms every candidate
/// violation in exact arithmetic. Samples are drawn in blocks with
/// generators split from the seed, so the result does not depend on the
/// number of threads.
FalsificationReport falsify_bilinear(const RationalMatrix& mr, const Rational& lambda_r, const RationalMatrix& ms,
                                     const Rational& lambda_s, std::size_t samples, std::uint64_t seed);
FalsificationReport falsify_bilinear_serial(const RationalMatrix& mr, const Rational& lambda_r,
                                            const RationalMatrix& ms, const Rational& lambda_s, std::size_t samples,
                                            std::uint64_t seed);

class NotAllSatisfied : public std::invalid_argument {
public:
    explicit NotAllSatisfied(std::size_t index)
        : std::invalid_argument("relation " + std::to_string(index) + " is not subsumed by the common relation"),
          index(index) {}
    std::size_t index;
};

/// Relations R_i subsumed by one S, split by the sign of their threshold.
/// Within each chain every relation implies the next one.
struct HierarchyShape {
    std::vector<std::size_t> positive;
    std::vector<std::size_t> nonpositive;
};

/// Each R_i = (M_i, lambda_i) is a region {x >= lambda_i / alpha_i} of the
/// same form x = e^T M_s f (empty when M_i = 0), so sorting by that bound
/// orders the relations by inclusion. Consecutive implications are
/// confirmed with `bilinear_rule_decision`. Throws NotAllSatisfied if some
/// R_i is not subsumed, and std::invalid_argument when M_s = 0.
HierarchyShape bilinear_hierarchy_shape(const std::vector<std::pair<RationalMatrix, Rational>>& relations,
                                        const RationalMatrix& ms, const Rational& lambda_s);

// Translation regions for Husband (C_H), Wife (C_W) and Married (C_M):
// Husband(X) <- Wife(Y), Married(X, Y) forces C_W + C_M ⊆ C_H, and
// Wife(Y) -> exists X. Married(X, Y) forces C_W ⊆ C_H + C_M.

enum class Premise {
    /// C_W + C_M ⊆ C_H.
    SumInHusband,
    /// C_W ⊆ C_H + C_M.
    WifeCovered,
};

class PremiseViolated : public std::runtime_error {
public:
    PremiseViolated(Premise premise, Point witness);
    Premise premise;
    Point witness;
};

/// q ∈ C_W written as q = p + r with p ∈ C_H, r ∈ C_M. Since q + r ∈ C_H
/// and q is the midpoint of p and q + r, q ∈ C_H.
struct BetweennessStep {
    Point q;
    Point p;
    Point r;
    Point shifted;
    bool q_in_husband = false;
};

/// One step per vertex of C_W. Throws PremiseViolated if either inclusion
/// fails (checked on vertices, exactly).
std::vector<BetweennessStep> translation_subsumption_demo(const Polytope& husband, const Polytope& wife,
                                                          const Polytope& married);

struct IntervalSearchReport {
    std::size_t tried = 0;
    /// Triples meeting both inclusions.
    std::size_t accepted = 0;
    /// Accepted triples with a vertex of C_W outside C_H.
    std::size_t wife_not_contained = 0;
    /// Accepted triples with C_H and C_W disjoint.
    std::size_t disjoint = 0;
};

/// Samples nonempty rational intervals until `wanted` triples satisfy both
/// inclusions, running the demo on each.
IntervalSearchReport search_interval_triples(std::size_t wanted, std::uint64_t seed);

// Composition R(X, Y), S(Y, Z) -> T(X, Z) under SimplE. As for bilinear
// subsumption, thresholds bound the products from below:
// R(e, f) iff <e_h, r, f_t> >= lambda_r and <f_h, ri, e_t> >= lambda_ri.

struct SimplECompositionParameters {
    RationalVector r, ri, s, si, t, ti;
    Rational lambda_r, lambda_ri, lambda_s, lambda_si, lambda_t, lambda_ti;
};

struct SimplECompositionWitness {
    SimplEEntity e, f, g;
    Rational k;
};

struct SimplECompositionOutcome {
    enum class Kind {
        Counterexample,
        /// Some body conjunct can never hold.
        BodyUnsatisfiable,
        /// Both head conjuncts always hold.
        HeadAlwaysTrue,
    };
    Kind kind = Kind::Counterexample;
    std::optional<SimplECompositionWitness> witness;
};

std::string to_string(SimplECompositionOutcome::Kind k);

/// Sign with sg(0) = 1.
int sg(const Rational& x);

/// Sign-pattern construction with a scale K doubled from 1 until the body
/// holds and the head fails by at least 1e-9 (cap 2^60), confirmed exactly.
/// Throws std::invalid_argument when dimensions differ.
SimplECompositionOutcome simple_composition_counterexample(const SimplECompositionParameters& p);

/// Body conjuncts and head conjuncts of the composition rule at a witness.
struct SimplECompositionValues {
    Rational r, ri, s, si, t, ti;
};
SimplECompositionValues composition_values(const SimplECompositionParameters& p, const SimplECompositionWitness& w);

}  // namespace geomodel
