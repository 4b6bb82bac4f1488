#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geomodel/chase.hpp"
#include "geomodel/geometry.hpp"

namespace geomodel {

/// Raised when exact body analysis would exceed its configured budget.
class DimensionCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MinimumN : public std::invalid_argument {
public:
    explicit MinimumN(std::size_t n)
        : std::invalid_argument("Helly instance needs n >= 2, got " + std::to_string(n)) {}
};

class PreconditionViolated : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExactCheckLimits {
    /// Total number of convex weights across all body atoms.
    std::size_t max_weights = 256;
    std::size_t ray_limit = 20000;
};

/// Set of joint variable assignments satisfying a conjunction of atoms:
/// `variables[i]` occupies coordinates [i m, (i + 1) m).
struct BodyPolytope {
    std::vector<std::string> variables;
    std::size_t m = 0;
    Polytope polytope;

    Point point_of(const Point& joint, const std::string& variable) const;
};

/// Vertices of {x | each body atom's argument tuple lies in its region}.
/// Each atom contributes convex weights over its region's generators;
/// repeated variables and constants become exact equalities between the
/// weighted combinations, and double description runs on the solution set
/// of those equalities. Variables are ordered by first occurrence.
/// Throws DimensionCapExceeded when `limits` would be exceeded.
BodyPolytope body_polytope(const GeometricInterpretation& eta, const std::vector<Atom>& body,
                           const ExactCheckLimits& limits = {});

struct RuleVerdict {
    enum class Status { Satisfied, Violated, Inconclusive };
    Status status = Status::Satisfied;
    /// Body assignment whose head requirement fails (Violated only).
    std::map<std::string, Point> witness;
    std::string reason;
};

/// Exact check of the universal condition over all of R^m: every body
/// vertex must satisfy the head (for existential heads, some completion of
/// the existential coordinates must exist, found by LP). Convexity of both
/// sides makes vertex checking sufficient.
RuleVerdict check_rule_geometric(const GeometricInterpretation& eta, const ExistentialRule& rule,
                                 const ExactCheckLimits& limits = {});

/// Satisfied iff the body polytope is empty.
RuleVerdict check_rule_geometric(const GeometricInterpretation& eta, const NegativeConstraint& constraint,
                                 const ExactCheckLimits& limits = {});

enum class Sampler {
    /// Half uniform in the bounding box of entity points, half random convex
    /// combinations of one to three entity points.
    Mixed,
    /// Midpoint of two distinct entity points.
    Midpoint,
};

struct ProbeOptions {
    std::size_t points = 3;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    Sampler sampler = Sampler::Mixed;
    std::size_t max_steps = kDefaultMaxSteps;
    std::size_t witness_rounds = kDefaultWitnessRounds;
};

struct ProbeTrial {
    enum class Outcome { Satisfiable, Unsatisfiable, Error };
    std::size_t index = 0;
    EntityMap points;
    std::size_t nulls_created = 0;
    /// Whether the satisfied atoms already form a model on their own.
    bool phi_is_model = false;
    Outcome outcome = Outcome::Satisfiable;
    /// Violated constraint and its grounded body (Unsatisfiable only).
    std::optional<ConstraintViolation> violation;
    std::vector<Atom> witness_atoms;
    std::string note;
};

struct ProbeReport {
    std::uint64_t seed = 0;
    std::vector<ProbeTrial> trials;

    std::size_t violations() const;
    std::size_t errors() const;
    bool all_satisfiable() const { return violations() == 0 && errors() == 0; }
};

/// Randomised instantiation of the extension condition: per trial, sample
/// fresh constants, add null witnesses, and chase (Σ, D ∪ φ). Trials run in
/// parallel with per-trial generators split from the seed; records are
/// ordered by trial index and independent of the thread count.
ProbeReport probe_extension(const GeometricInterpretation& eta, const KnowledgeBase& kb,
                            const ProbeOptions& options = {});

/// Same trials executed one after another.
ProbeReport probe_extension_serial(const GeometricInterpretation& eta, const KnowledgeBase& kb,
                                   const ProbeOptions& options = {});

/// `{"seed", "trials": [{"index", "points", "nulls_created", "phi_is_model",
/// "outcome", "violation", "witness_atoms", "note"}]}` with rationals as
/// strings. Loading throws FormatError on malformed input.
std::string dump_probe_json(const ProbeReport& report);
ProbeReport load_probe_json(const std::string& text);

std::string to_string(ProbeTrial::Outcome outcome);

/// Constants a1..an, unary A1..An, D = {A_i(a_j) | i != j} and the
/// constraint A1(X), ..., An(X) -> false.
KnowledgeBase helly_instance(std::size_t n);

struct HellyResult {
    /// A point in every A_i region, if one exists.
    std::optional<Point> point;
    /// Chase of the instance extended by a fresh constant at `point`.
    std::optional<ChaseResult> certificate;
    std::string fresh_constant;
    /// m <= n - 2, where a common point must exist.
    bool helly_guaranteed = false;
};

/// Looks for a common point of the regions of A1..An by LP and, if found,
/// extends `eta` with a fresh constant there and chases the instance with
/// the satisfied atoms. Throws PreconditionViolated unless every constant
/// has a point, every region is nonempty and η satisfies D.
HellyResult helly_break(const GeometricInterpretation& eta, std::size_t n);

}  // namespace geomodel
