#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "geomodel/rules.hpp"

namespace geomodel {

/// A finite set of ground atoms over constants and nulls.
using Interpretation = std::set<Atom>;

/// Variable name to object.
using Substitution = std::map<std::string, Term>;

class NotGuaranteedTerminating : public std::runtime_error {
public:
    NotGuaranteedTerminating()
        : std::runtime_error("ontology is neither datalog nor weakly acyclic; chase refused") {}
};

class NotDatalog : public std::runtime_error {
public:
    NotDatalog() : std::runtime_error("ontology contains existential rules") {}
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConstraintViolation {
    std::size_t constraint = 0;
    Substitution grounding;
};

struct ChaseResult {
    enum class Outcome { Model, Unsatisfiable, ResourceExceeded };

    Outcome outcome = Outcome::Model;
    /// The model, or the partial instance when the run stopped early.
    Interpretation atoms;
    std::optional<ConstraintViolation> violation;
    /// Number of rule applications performed.
    std::size_t steps = 0;
};

inline constexpr std::size_t kDefaultMaxSteps = 100000;

/// Restricted chase, breadth-first in rounds. Within a round rules are
/// visited in order and the matches of each rule in lexicographic order of
/// their substitution. Constraints are checked before the first round and
/// after every round.
ChaseResult chase(const KnowledgeBase& kb, std::size_t max_steps = kDefaultMaxSteps);

/// Chase of an arbitrary ground start instance, which may already contain
/// nulls; fresh nulls are numbered after the largest index present.
ChaseResult chase(const Ontology& ontology, const Interpretation& start,
                  std::size_t max_steps = kDefaultMaxSteps);

struct ModelCheck {
    bool ok = true;
    /// Human-readable description of the first violation found.
    std::string violation;
    explicit operator bool() const { return ok; }
};

ModelCheck is_model(const Interpretation& interp, const KnowledgeBase& kb);

/// Least model of a datalog knowledge base by naive bottom-up iteration.
ChaseResult datalog_fixpoint(const KnowledgeBase& kb);

/// Enumerates homomorphisms from `pattern` into `target` that extend `seed`.
/// Variables in the pattern are bound; constants and nulls must match
/// exactly. Stops as soon as `visit` returns false. Returns false iff stopped.
bool for_each_match(const std::vector<Atom>& pattern, const Interpretation& target,
                    const Substitution& seed,
                    const std::function<bool(const Substitution&)>& visit);

/// All matches of `pattern` into `target`, sorted.
std::vector<Substitution> all_matches(const std::vector<Atom>& pattern, const Interpretation& target,
                                      const Substitution& seed = {});

Atom substitute(const Atom& atom, const Substitution& s);

/// Largest null index occurring in `interp`, 0 if there is none.
std::size_t max_null_index(const Interpretation& interp);

/// Objects occurring in `interp`, in the canonical object order.
std::vector<Term> objects(const Interpretation& interp);

/// True iff there is a map h on nulls, identity on constants, with
/// h(from) a subset of `to`.
bool homomorphically_embeds(const Interpretation& from, const Interpretation& to);

/// True iff the two instances coincide after a bijective renaming of nulls.
bool equal_up_to_null_renaming(const Interpretation& a, const Interpretation& b);

/// `{"atoms": [{"rel": ..., "args": [...]}, ...]}` sorted by relation then
/// argument names.
std::string dump_model_json(const Interpretation& interp);
Interpretation load_model_json(const std::string& text);

}  // namespace geomodel
