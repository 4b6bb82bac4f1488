#include "geomodel/chase.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"

namespace geomodel {

namespace {

using Json = nlohmann::ordered_json;

bool unify(const Atom& pattern, const Atom& fact, Substitution& s, std::vector<std::string>& bound) {
    if (pattern.args.size() != fact.args.size()) return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const Term& p = pattern.args[i];
        const Term& f = fact.args[i];
        if (!p.is_variable()) {
            if (p != f) return false;
            continue;
        }
        auto it = s.find(p.name);
        if (it == s.end()) {
            s.emplace(p.name, f);
            bound.push_back(p.name);
        } else if (it->second != f) {
            return false;
        }
    }
    return true;
}

std::size_t bound_terms(const Atom& a, const Substitution& s) {
    std::size_t n = 0;
    for (const auto& t : a.args) n += !t.is_variable() || s.count(t.name);
    return n;
}

bool match_rec(const std::vector<Atom>& pattern, std::vector<bool>& done, std::size_t remaining,
               const Interpretation& target, Substitution& s,
               const std::function<bool(const Substitution&)>& visit) {
    if (remaining == 0) return visit(s);
    // Most constrained atom first.
    std::size_t pick = pattern.size();
    std::size_t best = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (done[i]) continue;
        const std::size_t b = bound_terms(pattern[i], s);
        if (pick == pattern.size() || b > best) {
            pick = i;
            best = b;
        }
    }
    const Atom& p = pattern[pick];
    done[pick] = true;
    for (auto it = target.lower_bound(Atom{p.relation, {}}); it != target.end() && it->relation == p.relation;
         ++it) {
        std::vector<std::string> bound;
        if (unify(p, *it, s, bound)) {
            if (!match_rec(pattern, done, remaining - 1, target, s, visit)) {
                for (const auto& v : bound) s.erase(v);
                done[pick] = false;
                return false;
            }
        }
        for (const auto& v : bound) s.erase(v);
    }
    done[pick] = false;
    return true;
}

std::optional<Substitution> first_match(const std::vector<Atom>& pattern, const Interpretation& target,
                                        const Substitution& seed = {}) {
    std::optional<Substitution> out;
    for_each_match(pattern, target, seed, [&](const Substitution& s) {
        out = s;
        return false;
    });
    return out;
}

Substitution restrict_to(const Substitution& s, const std::set<std::string>& vars) {
    Substitution out;
    for (const auto& [k, v] : s)
        if (vars.count(k)) out.emplace(k, v);
    return out;
}

std::set<std::string> head_variables(const ExistentialRule& r) {
    std::set<std::string> out;
    for (const auto& h : r.head)
        for (const auto& v : h.variables()) out.insert(v);
    return out;
}

std::optional<ConstraintViolation> violated_constraint(const Ontology& o, const Interpretation& atoms) {
    for (std::size_t i = 0; i < o.constraints.size(); ++i)
        if (auto m = first_match(o.constraints[i].body, atoms)) return ConstraintViolation{i, *m};
    return std::nullopt;
}

// Plain nested-loop join in body order; kept separate from the indexed
// matcher so the fixpoint can serve as an independent reference.
void naive_join(const std::vector<Atom>& body, std::size_t i, const Interpretation& facts, Substitution& s,
                std::vector<Substitution>& out) {
    if (i == body.size()) {
        out.push_back(s);
        return;
    }
    for (const auto& f : facts) {
        if (f.relation != body[i].relation) continue;
        Substitution saved = s;
        std::vector<std::string> bound;
        if (unify(body[i], f, s, bound)) naive_join(body, i + 1, facts, s, out);
        s = std::move(saved);
    }
}

Atom with_nulls_as_variables(const Atom& a) {
    Atom out = a;
    for (auto& t : out.args)
        if (t.kind == TermKind::Null) t = Term::variable("?" + t.name);
    return out;
}

}  // namespace

bool for_each_match(const std::vector<Atom>& pattern, const Interpretation& target,
                    const Substitution& seed, const std::function<bool(const Substitution&)>& visit) {
    Substitution s = seed;
    std::vector<bool> done(pattern.size(), false);
    return match_rec(pattern, done, pattern.size(), target, s, visit);
}

std::vector<Substitution> all_matches(const std::vector<Atom>& pattern, const Interpretation& target,
                                      const Substitution& seed) {
    std::vector<Substitution> out;
    for_each_match(pattern, target, seed, [&](const Substitution& s) {
        out.push_back(s);
        return true;
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Atom substitute(const Atom& atom, const Substitution& s) {
    Atom out = atom;
    for (auto& t : out.args) {
        if (!t.is_variable()) continue;
        auto it = s.find(t.name);
        if (it != s.end()) t = it->second;
    }
    return out;
}

std::size_t max_null_index(const Interpretation& interp) {
    std::size_t m = 0;
    for (const auto& a : interp)
        for (const auto& t : a.args)
            if (t.kind == TermKind::Null)
                if (auto i = null_index(t.name)) m = std::max(m, *i);
    return m;
}

std::vector<Term> objects(const Interpretation& interp) {
    std::set<Term, ObjectOrder> objs;
    for (const auto& a : interp) objs.insert(a.args.begin(), a.args.end());
    return {objs.begin(), objs.end()};
}

ChaseResult chase(const KnowledgeBase& kb, std::size_t max_steps) {
    return chase(kb.ontology, kb.database, max_steps);
}

ChaseResult chase(const Ontology& ontology, const Interpretation& start, std::size_t max_steps) {
    if (!ontology.is_datalog() && !is_weakly_acyclic(ontology)) throw NotGuaranteedTerminating();
    ChaseResult res;
    res.atoms = start;
    std::size_t next_null = max_null_index(start) + 1;

    auto stop_if_violated = [&] {
        res.violation = violated_constraint(ontology, res.atoms);
        if (res.violation) res.outcome = ChaseResult::Outcome::Unsatisfiable;
        return res.violation.has_value();
    };
    if (stop_if_violated()) return res;

    std::vector<std::set<std::string>> heads;
    for (const auto& r : ontology.rules) heads.push_back(head_variables(r));

    while (true) {
        const Interpretation snapshot = res.atoms;
        bool fired = false;
        for (std::size_t ri = 0; ri < ontology.rules.size(); ++ri) {
            const auto& rule = ontology.rules[ri];
            for (const auto& match : all_matches(rule.body, snapshot)) {
                Substitution s = restrict_to(match, heads[ri]);
                if (first_match(rule.head, res.atoms, s)) continue;
                if (res.steps >= max_steps) {
                    res.outcome = ChaseResult::Outcome::ResourceExceeded;
                    return res;
                }
                for (const auto& z : rule.evars) s[z] = Term::null(null_name(next_null++));
                for (const auto& h : rule.head) res.atoms.insert(substitute(h, s));
                ++res.steps;
                fired = true;
            }
        }
        if (!fired) break;
        if (stop_if_violated()) return res;
    }
    res.outcome = ChaseResult::Outcome::Model;
    return res;
}

ModelCheck is_model(const Interpretation& interp, const KnowledgeBase& kb) {
    ModelCheck out;
    for (const auto& f : kb.database) {
        if (!interp.count(f)) {
            out.ok = false;
            out.violation = "missing fact " + to_string(f);
            return out;
        }
    }
    if (auto v = violated_constraint(kb.ontology, interp)) {
        out.ok = false;
        out.violation = "constraint body matches: " + render(kb.ontology.constraints[v->constraint]);
        return out;
    }
    for (const auto& rule : kb.ontology.rules) {
        const auto hv = head_variables(rule);
        for_each_match(rule.body, interp, {}, [&](const Substitution& m) {
            if (first_match(rule.head, interp, restrict_to(m, hv))) return true;
            out.ok = false;
            out.violation = "unsatisfied rule " + render(rule);
            return false;
        });
        if (!out.ok) return out;
    }
    return out;
}

ChaseResult datalog_fixpoint(const KnowledgeBase& kb) {
    if (!kb.ontology.is_datalog()) throw NotDatalog();
    ChaseResult res;
    res.atoms = kb.database;
    while (true) {
        Interpretation next = res.atoms;
        for (const auto& rule : kb.ontology.rules) {
            std::vector<Substitution> found;
            Substitution s;
            naive_join(rule.body, 0, res.atoms, s, found);
            for (const auto& m : found)
                for (const auto& h : rule.head) next.insert(substitute(h, m));
        }
        if (next == res.atoms) break;
        res.steps += next.size() - res.atoms.size();
        res.atoms = std::move(next);
    }
    for (std::size_t i = 0; i < kb.ontology.constraints.size(); ++i) {
        std::vector<Substitution> found;
        Substitution s;
        naive_join(kb.ontology.constraints[i].body, 0, res.atoms, s, found);
        if (!found.empty()) {
            res.outcome = ChaseResult::Outcome::Unsatisfiable;
            res.violation = ConstraintViolation{i, found.front()};
            return res;
        }
    }
    return res;
}

bool homomorphically_embeds(const Interpretation& from, const Interpretation& to) {
    std::vector<Atom> pattern;
    for (const auto& a : from) pattern.push_back(with_nulls_as_variables(a));
    return first_match(pattern, to).has_value();
}

bool equal_up_to_null_renaming(const Interpretation& a, const Interpretation& b) {
    if (a.size() != b.size()) return false;
    std::vector<Atom> pattern;
    for (const auto& x : a) pattern.push_back(with_nulls_as_variables(x));
    bool found = false;
    for_each_match(pattern, b, {}, [&](const Substitution& s) {
        std::set<Term> image;
        for (const auto& [var, t] : s) {
            if (t.kind != TermKind::Null || !image.insert(t).second) return true;
        }
        found = true;
        return false;
    });
    return found;
}

std::string dump_model_json(const Interpretation& interp) {
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
    for (const auto& a : interp) {
        std::vector<std::string> args;
        for (const auto& t : a.args) args.push_back(t.name);
        rows.emplace_back(a.relation, std::move(args));
    }
    std::sort(rows.begin(), rows.end());
    Json atoms = Json::array();
    for (const auto& [rel, args] : rows) atoms.push_back(Json{{"rel", rel}, {"args", args}});
    return Json{{"atoms", atoms}}.dump(2) + "\n";
}

Interpretation load_model_json(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("model dump is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array())
        throw FormatError("model dump needs an \"atoms\" array");
    Interpretation out;
    std::map<std::string, std::size_t> arities;
    for (const auto& a : doc["atoms"]) {
        if (!a.is_object() || !a.contains("rel") || !a["rel"].is_string() || !a.contains("args") ||
            !a["args"].is_array() || a["args"].empty())
            throw FormatError("malformed atom entry in model dump");
        Atom atom{a["rel"].get<std::string>(), {}};
        for (const auto& t : a["args"]) {
            if (!t.is_string() || t.get<std::string>().empty()) throw FormatError("atom arguments must be names");
            const auto name = t.get<std::string>();
            if (std::isupper(static_cast<unsigned char>(name[0])))
                throw FormatError("variable " + name + " in a ground model");
            atom.args.push_back(object_from_name(name));
        }
        try {
            record_arities({atom}, arities);
        } catch (const ArityMismatch& e) {
            throw FormatError(e.what());
        }
        out.insert(std::move(atom));
    }
    return out;
}

}  // namespace geomodel
