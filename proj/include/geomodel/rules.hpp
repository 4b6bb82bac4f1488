#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geomodel {

enum class TermKind { Constant, Null, Variable };

/// A constant, labelled null or variable. The three kinds never compare
/// equal, even when their names coincide.
struct Term {
    TermKind kind = TermKind::Constant;
    std::string name;

    static Term constant(std::string name) { return {TermKind::Constant, std::move(name)}; }
    static Term null(std::string name) { return {TermKind::Null, std::move(name)}; }
    static Term variable(std::string name) { return {TermKind::Variable, std::move(name)}; }

    bool is_variable() const { return kind == TermKind::Variable; }
    bool is_object() const { return kind != TermKind::Variable; }

    auto operator<=>(const Term&) const = default;
};

/// Name of the i-th null (1-based): `_n<i>`.
std::string null_name(std::size_t index);

/// Index of a null named `_n<i>`, or nullopt for any other name.
std::optional<std::size_t> null_index(std::string_view name);

/// Object from its textual name: names starting with '_' are nulls, anything
/// else is a constant.
Term object_from_name(std::string name);

/// Ordering used to enumerate objects: constants lexicographically, then
/// nulls by numeric index.
struct ObjectOrder {
    bool operator()(const Term& a, const Term& b) const;
};

struct Atom {
    std::string relation;
    std::vector<Term> args;

    std::size_t arity() const { return args.size(); }
    bool is_ground() const;
    std::set<std::string> variables() const;

    auto operator<=>(const Atom&) const = default;
};

std::string to_string(const Term& t);
std::string to_string(const Atom& a);

/// B1, ..., Bn -> exists Z. H1, ..., Hk. Heads stay conjunctive as written;
/// `normalize_single_head` produces the single-atom form.
struct ExistentialRule {
    std::vector<Atom> body;
    std::vector<Atom> head;
    std::set<std::string> evars;

    bool is_datalog() const { return evars.empty(); }
    /// Variables shared between body and head.
    std::set<std::string> frontier() const;
    std::set<std::string> body_variables() const;

    bool operator==(const ExistentialRule&) const = default;
};

struct NegativeConstraint {
    std::vector<Atom> body;
    bool operator==(const NegativeConstraint&) const = default;
};

struct Ontology {
    std::vector<ExistentialRule> rules;
    std::vector<NegativeConstraint> constraints;

    bool is_datalog() const;
    bool operator==(const Ontology&) const = default;
};

struct KnowledgeBase {
    Ontology ontology;
    std::set<Atom> database;
    std::map<std::string, std::size_t> arities;

    /// Constants occurring anywhere in the knowledge base.
    std::set<Term> constants() const;
    bool operator==(const KnowledgeBase&) const = default;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t line, std::size_t col, const std::string& message);
    std::size_t line;
    std::size_t col;
};

class ArityMismatch : public std::runtime_error {
public:
    ArityMismatch(std::string relation, std::size_t seen, std::size_t expected);
    std::string relation;
    std::size_t seen;
    std::size_t expected;
};

class VariableOnlyInHeadWithoutExists : public std::runtime_error {
public:
    VariableOnlyInHeadWithoutExists(std::size_t line, std::string variable);
    std::string variable;
};

class BodyTooLarge : public std::runtime_error {
public:
    explicit BodyTooLarge(std::size_t atoms)
        : std::runtime_error("rule body with " + std::to_string(atoms) +
                             " atoms exceeds the quasi-chained search cap"),
          atoms(atoms) {}
    std::size_t atoms;
};

KnowledgeBase parse_program(std::string_view text);

/// Text form accepted by `parse_program`; facts first, then rules, then
/// constraints.
std::string render(const KnowledgeBase& kb);
std::string render(const ExistentialRule& rule);
std::string render(const NegativeConstraint& constraint);

/// Records the arity of every relation in `atoms`; throws ArityMismatch on a
/// clash with what `arities` already holds.
void record_arities(const std::vector<Atom>& atoms, std::map<std::string, std::size_t>& arities);

inline constexpr std::string_view kAuxPrefix = "__aux";

bool is_auxiliary_relation(std::string_view relation);

/// Splits a conjunctive head into one rule producing `__aux<aux_index>` over
/// the frontier and existential variables plus one projection rule per
/// distinct head atom. Single-atom heads (after removing duplicates) are
/// returned unchanged.
std::vector<ExistentialRule> normalize_single_head(const ExistentialRule& rule,
                                                   std::size_t aux_index);

/// Applies `normalize_single_head` to every rule, numbering auxiliary
/// relations so they do not collide with existing names.
Ontology normalize_ontology(const Ontology& ontology);

inline constexpr std::size_t kDefaultQcBodyCap = 8;

struct QcResult {
    bool quasi_chained = false;
    /// Witnessing body order (indices into the body) when quasi-chained.
    std::vector<std::size_t> order;
};

/// Searches body orderings for one where every atom shares at most one
/// variable with the atoms before it.
QcResult is_quasi_chained(const std::vector<Atom>& body, std::size_t cap = kDefaultQcBodyCap);
QcResult is_quasi_chained(const ExistentialRule& rule, std::size_t cap = kDefaultQcBodyCap);
QcResult is_quasi_chained(const NegativeConstraint& constraint, std::size_t cap = kDefaultQcBodyCap);

struct OntologyQc {
    bool quasi_chained = true;
    /// First offending statement, when not quasi-chained.
    std::optional<std::size_t> rule;
    std::optional<std::size_t> constraint;
    std::string offending;
};

OntologyQc check_quasi_chained(const Ontology& ontology, std::size_t cap = kDefaultQcBodyCap);

/// Position dependency graph test: no cycle passes through an edge into an
/// existential position.
bool is_weakly_acyclic(const Ontology& ontology);

/// Syntactic fragment membership, reported for diagnostics only.
struct FragmentReport {
    bool datalog = false;
    bool linear = false;
    bool guarded = false;
    bool weakly_acyclic = false;
    bool quasi_chained = false;
};

FragmentReport classify(const Ontology& ontology);

}  // namespace geomodel
