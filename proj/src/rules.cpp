#include "geomodel/rules.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <queue>
#include <sstream>

namespace geomodel {

std::string null_name(std::size_t index) { return "_n" + std::to_string(index); }

std::optional<std::size_t> null_index(std::string_view name) {
    if (name.size() < 3 || name.substr(0, 2) != "_n") return std::nullopt;
    std::size_t v = 0;
    for (char c : name.substr(2)) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    return v;
}

Term object_from_name(std::string name) {
    if (!name.empty() && name.front() == '_') return Term::null(std::move(name));
    return Term::constant(std::move(name));
}

bool ObjectOrder::operator()(const Term& a, const Term& b) const {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.kind == TermKind::Null) {
        const auto ia = null_index(a.name);
        const auto ib = null_index(b.name);
        if (ia && ib && *ia != *ib) return *ia < *ib;
        if (ia.has_value() != ib.has_value()) return ia.has_value();
    }
    return a.name < b.name;
}

bool Atom::is_ground() const {
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::set<std::string> Atom::variables() const {
    std::set<std::string> out;
    for (const auto& t : args)
        if (t.is_variable()) out.insert(t.name);
    return out;
}

std::string to_string(const Term& t) { return t.name; }

std::string to_string(const Atom& a) {
    std::string s = a.relation + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ",";
        s += a.args[i].name;
    }
    return s + ")";
}

std::set<std::string> ExistentialRule::body_variables() const {
    std::set<std::string> out;
    for (const auto& b : body)
        for (const auto& t : b.args)
            if (t.is_variable()) out.insert(t.name);
    return out;
}

std::set<std::string> ExistentialRule::frontier() const {
    const auto bv = body_variables();
    std::set<std::string> out;
    for (const auto& h : head)
        for (const auto& t : h.args)
            if (t.is_variable() && bv.count(t.name)) out.insert(t.name);
    return out;
}

bool Ontology::is_datalog() const {
    return std::all_of(rules.begin(), rules.end(), [](const auto& r) { return r.is_datalog(); });
}

std::set<Term> KnowledgeBase::constants() const {
    std::set<Term> out;
    auto scan = [&](const std::vector<Atom>& atoms) {
        for (const auto& a : atoms)
            for (const auto& t : a.args)
                if (t.kind == TermKind::Constant) out.insert(t);
    };
    for (const auto& r : ontology.rules) {
        scan(r.body);
        scan(r.head);
    }
    for (const auto& c : ontology.constraints) scan(c.body);
    for (const auto& a : database)
        for (const auto& t : a.args)
            if (t.kind == TermKind::Constant) out.insert(t);
    return out;
}

SyntaxError::SyntaxError(std::size_t line, std::size_t col, const std::string& message)
    : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(col) +
                         ": " + message),
      line(line),
      col(col) {}

ArityMismatch::ArityMismatch(std::string relation, std::size_t seen, std::size_t expected)
    : std::runtime_error("relation " + relation + " used with arity " + std::to_string(seen) +
                         " but previously with arity " + std::to_string(expected)),
      relation(std::move(relation)),
      seen(seen),
      expected(expected) {}

VariableOnlyInHeadWithoutExists::VariableOnlyInHeadWithoutExists(std::size_t line,
                                                                 std::string variable)
    : std::runtime_error("line " + std::to_string(line) + ": head variable " + variable +
                         " occurs neither in the body nor under exists"),
      variable(std::move(variable)) {}

void record_arities(const std::vector<Atom>& atoms, std::map<std::string, std::size_t>& arities) {
    for (const auto& a : atoms) {
        auto [it, inserted] = arities.emplace(a.relation, a.arity());
        if (!inserted && it->second != a.arity())
            throw ArityMismatch(a.relation, a.arity(), it->second);
    }
}

bool is_auxiliary_relation(std::string_view relation) {
    return relation.substr(0, kAuxPrefix.size()) == kAuxPrefix;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Dot, Arrow, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t col;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space();
        const std::size_t l = line_, c = col_;
        if (pos_ >= src_.size()) return {Tok::End, "", l, c};
        const char ch = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::string id;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                          src_[pos_] == '_'))
                id += advance();
            return {Tok::Ident, id, l, c};
        }
        advance();
        switch (ch) {
            case '(': return {Tok::LParen, "(", l, c};
            case ')': return {Tok::RParen, ")", l, c};
            case ',': return {Tok::Comma, ",", l, c};
            case '.': return {Tok::Dot, ".", l, c};
            case '-':
                if (pos_ < src_.size() && src_[pos_] == '>') {
                    advance();
                    return {Tok::Arrow, "->", l, c};
                }
                break;
            default: break;
        }
        throw SyntaxError(l, c, std::string("unexpected character '") + ch + "'");
    }

private:
    char advance() {
        const char ch = src_[pos_++];
        if (ch == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return ch;
    }
    void skip_space() {
        while (pos_ < src_.size()) {
            const char ch = src_[pos_];
            if (ch == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { shift(); }

    KnowledgeBase parse() {
        KnowledgeBase kb;
        while (cur_.kind != Tok::End) statement(kb);
        return kb;
    }

private:
    void shift() { cur_ = lex_.next(); }

    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(cur_.line, cur_.col, msg); }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) fail(std::string("expected ") + what);
        shift();
    }

    Term term() {
        if (cur_.kind != Tok::Ident) fail("expected a term");
        const Token t = cur_;
        shift();
        const unsigned char c0 = static_cast<unsigned char>(t.text[0]);
        if (std::isupper(c0)) return Term::variable(t.text);
        if (std::islower(c0)) return Term::constant(t.text);
        throw SyntaxError(t.line, t.col, "identifier '" + t.text + "' is not a constant or variable");
    }

    Atom atom(const Token& name) {
        const unsigned char c0 = static_cast<unsigned char>(name.text[0]);
        if (!std::isalpha(c0) && !is_auxiliary_relation(name.text))
            throw SyntaxError(name.line, name.col, "invalid relation name '" + name.text + "'");
        if (name.text == "exists" || name.text == "false")
            throw SyntaxError(name.line, name.col, "'" + name.text + "' is reserved");
        Atom a{name.text, {}};
        expect(Tok::LParen, "'('");
        a.args.push_back(term());
        while (cur_.kind == Tok::Comma) {
            shift();
            a.args.push_back(term());
        }
        expect(Tok::RParen, "')'");
        return a;
    }

    std::vector<Atom> atom_list() {
        std::vector<Atom> atoms;
        do {
            if (!atoms.empty()) shift();
            if (cur_.kind != Tok::Ident) fail("expected an atom");
            const Token name = cur_;
            shift();
            atoms.push_back(atom(name));
        } while (cur_.kind == Tok::Comma);
        return atoms;
    }

    void statement(KnowledgeBase& kb) {
        const std::size_t line = cur_.line;
        auto body = atom_list();
        if (cur_.kind == Tok::Dot) {
            shift();
            if (body.size() != 1) throw SyntaxError(line, 1, "a fact is a single atom");
            if (!body[0].is_ground()) throw SyntaxError(line, 1, "facts must be ground");
            record_arities(body, kb.arities);
            kb.database.insert(body[0]);
            return;
        }
        expect(Tok::Arrow, "'.' or '->'");
        if (cur_.kind == Tok::Ident && cur_.text == "false") {
            shift();
            expect(Tok::Dot, "'.'");
            record_arities(body, kb.arities);
            kb.ontology.constraints.push_back({std::move(body)});
            return;
        }
        ExistentialRule rule;
        rule.body = std::move(body);
        const auto body_vars = rule.body_variables();
        if (cur_.kind == Tok::Ident && cur_.text == "exists") {
            shift();
            do {
                if (!rule.evars.empty()) shift();
                const Token v = cur_;
                const Term t = term();
                if (!t.is_variable()) throw SyntaxError(v.line, v.col, "expected a variable after exists");
                if (body_vars.count(t.name))
                    throw SyntaxError(v.line, v.col, "existential variable " + t.name + " occurs in the body");
                rule.evars.insert(t.name);
            } while (cur_.kind == Tok::Comma);
            expect(Tok::Dot, "'.' after existential variables");
        }
        if (cur_.kind != Tok::Ident) fail("missing rule head");
        rule.head = atom_list();
        expect(Tok::Dot, "'.'");
        std::set<std::string> head_vars;
        for (const auto& h : rule.head)
            for (const auto& t : h.args)
                if (t.is_variable()) head_vars.insert(t.name);
        for (const auto& v : head_vars)
            if (!body_vars.count(v) && !rule.evars.count(v)) throw VariableOnlyInHeadWithoutExists(line, v);
        for (const auto& v : rule.evars)
            if (!head_vars.count(v))
                throw SyntaxError(line, 1, "existential variable " + v + " does not occur in the head");
        record_arities(rule.body, kb.arities);
        record_arities(rule.head, kb.arities);
        kb.ontology.rules.push_back(std::move(rule));
    }

    Lexer lex_;
    Token cur_{Tok::End, "", 1, 1};
};

std::string join_atoms(const std::vector<Atom>& atoms) {
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) s += ", ";
        s += to_string(atoms[i]);
    }
    return s;
}

}  // namespace

KnowledgeBase parse_program(std::string_view text) { return Parser(text).parse(); }

std::string render(const ExistentialRule& rule) {
    std::string s = join_atoms(rule.body) + " -> ";
    if (!rule.evars.empty()) {
        s += "exists ";
        bool first = true;
        for (const auto& v : rule.evars) {
            if (!first) s += ", ";
            s += v;
            first = false;
        }
        s += ". ";
    }
    return s + join_atoms(rule.head) + ".";
}

std::string render(const NegativeConstraint& constraint) {
    return join_atoms(constraint.body) + " -> false.";
}

std::string render(const KnowledgeBase& kb) {
    std::ostringstream out;
    for (const auto& a : kb.database) out << to_string(a) << ".\n";
    for (const auto& r : kb.ontology.rules) out << render(r) << "\n";
    for (const auto& c : kb.ontology.constraints) out << render(c) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Normalisation

std::vector<ExistentialRule> normalize_single_head(const ExistentialRule& rule,
                                                   std::size_t aux_index) {
    std::vector<Atom> head;
    for (const auto& h : rule.head)
        if (std::find(head.begin(), head.end(), h) == head.end()) head.push_back(h);
    if (head.size() == 1) {
        ExistentialRule r = rule;
        r.head = std::move(head);
        return {r};
    }
    const auto body_vars = rule.body_variables();
    std::vector<std::string> aux_vars;
    for (const auto& h : head)
        for (const auto& t : h.args)
            if (t.is_variable() && std::find(aux_vars.begin(), aux_vars.end(), t.name) == aux_vars.end())
                aux_vars.push_back(t.name);
    Atom aux{std::string(kAuxPrefix) + std::to_string(aux_index), {}};
    for (const auto& v : aux_vars) aux.args.push_back(Term::variable(v));
    // Head constants stay in the projection rules.
    std::vector<ExistentialRule> out;
    out.push_back({rule.body, {aux}, rule.evars});
    for (const auto& h : head) out.push_back({{aux}, {h}, {}});
    return out;
}

Ontology normalize_ontology(const Ontology& ontology) {
    std::set<std::string> used;
    auto note = [&](const std::vector<Atom>& atoms) {
        for (const auto& a : atoms) used.insert(a.relation);
    };
    for (const auto& r : ontology.rules) {
        note(r.body);
        note(r.head);
    }
    for (const auto& c : ontology.constraints) note(c.body);

    Ontology out;
    out.constraints = ontology.constraints;
    std::size_t next = 1;
    for (const auto& r : ontology.rules) {
        while (used.count(std::string(kAuxPrefix) + std::to_string(next))) ++next;
        auto parts = normalize_single_head(r, next);
        if (parts.size() > 1) used.insert(std::string(kAuxPrefix) + std::to_string(next++));
        for (auto& p : parts) out.rules.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structural analyses

QcResult is_quasi_chained(const std::vector<Atom>& body, std::size_t cap) {
    const std::size_t n = body.size();
    if (n > cap) throw BodyTooLarge(n);
    std::vector<std::set<std::string>> vars;
    for (const auto& a : body) vars.push_back(a.variables());

    QcResult result;
    std::vector<std::size_t> order;
    std::vector<bool> used(n, false);
    // Depth-first search over orderings; a failing prefix prunes all of its
    // extensions, so this visits permutations in lexicographic order.
    std::function<bool(const std::set<std::string>&)> extend = [&](const std::set<std::string>& seen) {
        if (order.size() == n) return true;
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            std::size_t shared = 0;
            for (const auto& v : vars[i]) shared += seen.count(v);
            if (shared > 1) continue;
            used[i] = true;
            order.push_back(i);
            std::set<std::string> next = seen;
            next.insert(vars[i].begin(), vars[i].end());
            if (extend(next)) return true;
            order.pop_back();
            used[i] = false;
        }
        return false;
    };
    if (extend({})) {
        result.quasi_chained = true;
        result.order = order;
    }
    return result;
}

QcResult is_quasi_chained(const ExistentialRule& rule, std::size_t cap) {
    return is_quasi_chained(rule.body, cap);
}

QcResult is_quasi_chained(const NegativeConstraint& constraint, std::size_t cap) {
    return is_quasi_chained(constraint.body, cap);
}

OntologyQc check_quasi_chained(const Ontology& ontology, std::size_t cap) {
    OntologyQc out;
    for (std::size_t i = 0; i < ontology.rules.size(); ++i) {
        if (!is_quasi_chained(ontology.rules[i], cap).quasi_chained) {
            out.quasi_chained = false;
            out.rule = i;
            out.offending = render(ontology.rules[i]);
            return out;
        }
    }
    for (std::size_t i = 0; i < ontology.constraints.size(); ++i) {
        if (!is_quasi_chained(ontology.constraints[i], cap).quasi_chained) {
            out.quasi_chained = false;
            out.constraint = i;
            out.offending = render(ontology.constraints[i]);
            return out;
        }
    }
    return out;
}

bool is_weakly_acyclic(const Ontology& ontology) {
    using Position = std::pair<std::string, std::size_t>;
    std::map<Position, std::set<Position>> edges;
    std::vector<std::pair<Position, Position>> special;
    for (const auto& rule : ontology.rules) {
        for (const auto& b : rule.body) {
            for (std::size_t i = 0; i < b.args.size(); ++i) {
                const auto& x = b.args[i];
                if (!x.is_variable()) continue;
                bool in_head = false;
                for (const auto& h : rule.head)
                    for (const auto& t : h.args) in_head |= t == x;
                if (!in_head) continue;
                const Position from{b.relation, i};
                for (const auto& h : rule.head) {
                    for (std::size_t j = 0; j < h.args.size(); ++j) {
                        const auto& t = h.args[j];
                        if (t == x) edges[from].insert({h.relation, j});
                        if (t.is_variable() && rule.evars.count(t.name)) {
                            edges[from].insert({h.relation, j});
                            special.push_back({from, {h.relation, j}});
                        }
                    }
                }
            }
        }
    }
    // A special edge u -> v lies on a cycle iff u is reachable from v.
    for (const auto& [u, v] : special) {
        std::set<Position> seen{v};
        std::queue<Position> q;
        q.push(v);
        while (!q.empty()) {
            const auto p = q.front();
            q.pop();
            if (p == u) return false;
            auto it = edges.find(p);
            if (it == edges.end()) continue;
            for (const auto& nxt : it->second)
                if (seen.insert(nxt).second) q.push(nxt);
        }
    }
    return true;
}

FragmentReport classify(const Ontology& ontology) {
    FragmentReport r;
    r.datalog = ontology.is_datalog();
    r.linear = std::all_of(ontology.rules.begin(), ontology.rules.end(),
                           [](const auto& rule) { return rule.body.size() == 1; });
    r.guarded = std::all_of(ontology.rules.begin(), ontology.rules.end(), [](const auto& rule) {
        const auto vars = rule.body_variables();
        return std::any_of(rule.body.begin(), rule.body.end(), [&](const Atom& a) {
            const auto av = a.variables();
            return std::includes(av.begin(), av.end(), vars.begin(), vars.end());
        });
    });
    r.weakly_acyclic = is_weakly_acyclic(ontology);
    try {
        r.quasi_chained = check_quasi_chained(ontology).quasi_chained;
    } catch (const BodyTooLarge&) {
        r.quasi_chained = false;
    }
    return r;
}

}  // namespace geomodel
