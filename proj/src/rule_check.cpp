#include "geomodel/rule_check.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "geomodel/lp.hpp"
#include "json.hpp"

namespace geomodel {

namespace {

using Status = RuleVerdict::Status;
using Json = nlohmann::ordered_json;

const Point& entity_point(const GeometricInterpretation& eta, const Term& t) {
    auto it = eta.entities.find(t);
    if (it == eta.entities.end()) throw UnknownObject(t.name);
    return it->second;
}

Polytope checked_region(const GeometricInterpretation& eta, const Atom& atom) {
    Polytope r = eta.region(atom.relation);
    if (r.dim() != atom.arity() * eta.m) throw DimensionMismatch(atom.arity() * eta.m, r.dim());
    return r;
}

std::map<std::string, Point> witness_map(const BodyPolytope& body, const Point& joint) {
    std::map<std::string, Point> out;
    for (const auto& v : body.variables) out.emplace(v, body.point_of(joint, v));
    return out;
}

Point head_point(const GeometricInterpretation& eta, const Atom& head, const std::map<std::string, Point>& vals) {
    Point out;
    for (const auto& t : head.args) {
        const Point& p = t.is_variable() ? vals.at(t.name) : entity_point(eta, t);
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

// Is there a completion of the existential coordinates putting every head
// atom inside its region?
bool head_completable(const GeometricInterpretation& eta, const ExistentialRule& rule,
                      const std::map<std::string, Point>& vals) {
    const std::size_t m = eta.m;
    FeasibilityProblem lp;
    std::map<std::string, std::size_t> zvar;
    for (const auto& z : rule.evars) {
        zvar[z] = lp.num_variables();
        for (std::size_t c = 0; c < m; ++c) lp.add_free();
    }
    for (const auto& h : rule.head) {
        const Polytope region = checked_region(eta, h);
        if (region.empty()) return false;
        const auto& w = region.vertices();
        const std::size_t first = lp.num_variables();
        for (std::size_t j = 0; j < w.size(); ++j) lp.add_nonnegative();
        std::vector<std::pair<std::size_t, Rational>> sum;
        for (std::size_t j = 0; j < w.size(); ++j) sum.emplace_back(first + j, Rational(1));
        lp.add_equality(std::move(sum), 1);
        for (std::size_t p = 0; p < h.args.size(); ++p) {
            const Term& t = h.args[p];
            const bool existential = t.is_variable() && rule.evars.count(t.name);
            for (std::size_t c = 0; c < m; ++c) {
                std::vector<std::pair<std::size_t, Rational>> row;
                for (std::size_t j = 0; j < w.size(); ++j)
                    if (w[j][p * m + c] != 0) row.emplace_back(first + j, w[j][p * m + c]);
                Rational rhs = 0;
                if (existential)
                    row.emplace_back(zvar.at(t.name) + c, Rational(-1));
                else
                    rhs = t.is_variable() ? vals.at(t.name)[c] : entity_point(eta, t)[c];
                lp.add_equality(std::move(row), std::move(rhs));
            }
        }
    }
    return lp.solve().has_value();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr int kGrid = 1000;

Point sample_point(const std::vector<const Point*>& entities, std::size_t m, Sampler sampler, std::mt19937_64& rng) {
    Point p(m, Rational(0));
    if (entities.empty()) return p;
    std::uniform_int_distribution<std::size_t> pick(0, entities.size() - 1);
    std::uniform_int_distribution<int> grid(0, kGrid);

    if (sampler == Sampler::Midpoint) {
        const std::size_t a = pick(rng);
        std::size_t b = a;
        if (entities.size() > 1)
            while (b == a) b = pick(rng);
        for (std::size_t c = 0; c < m; ++c) p[c] = ((*entities[a])[c] + (*entities[b])[c]) / 2;
        return p;
    }
    if (std::bernoulli_distribution(0.5)(rng)) {
        for (std::size_t c = 0; c < m; ++c) {
            Rational lo = (*entities[0])[c], hi = lo;
            for (const auto* e : entities) {
                lo = std::min(lo, (*e)[c]);
                hi = std::max(hi, (*e)[c]);
            }
            p[c] = lo + (hi - lo) * Rational(grid(rng), kGrid);
        }
        return p;
    }
    // Uniform weights on the simplex from sorted grid spacings.
    const std::size_t k = std::min<std::size_t>(entities.size(), std::uniform_int_distribution<std::size_t>(1, 3)(rng));
    std::vector<std::size_t> chosen;
    while (chosen.size() < k) {
        const std::size_t i = pick(rng);
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
    }
    std::vector<int> cuts{0, kGrid};
    for (std::size_t i = 0; i + 1 < k; ++i) cuts.push_back(grid(rng));
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i < k; ++i) {
        const Rational w(cuts[i + 1] - cuts[i], kGrid);
        for (std::size_t c = 0; c < m; ++c) p[c] += w * (*entities[chosen[i]])[c];
    }
    return p;
}

ProbeTrial run_trial(const GeometricInterpretation& eta, const KnowledgeBase& kb, const Interpretation& base,
                     const ProbeOptions& options, std::size_t index) {
    ProbeTrial trial;
    trial.index = index;
    std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(index)));
    std::vector<const Point*> entities;
    for (const auto& [t, p] : eta.entities) entities.push_back(&p);

    std::size_t serial = 1;
    for (std::size_t i = 0; i < options.points; ++i) {
        Term name;
        do {
            name = Term::constant("fresh" + std::to_string(serial++));
        } while (eta.entities.count(name));
        trial.points.emplace(name, sample_point(entities, eta.m, options.sampler, rng));
    }

    GeometricInterpretation ext = extend_with_points(eta, trial.points);
    try {
        auto syn = synthesize_null_witnesses(ext, base, kb, options.witness_rounds);
        trial.nulls_created = syn.created.size();
        ext = std::move(syn.eta);
    } catch (const NotProp3Base& e) {
        trial.note = std::string("no witnesses synthesised: ") + e.what();
    } catch (const RoundsExceeded& e) {
        trial.outcome = ProbeTrial::Outcome::Error;
        trial.note = e.what();
        return trial;
    }

    const Interpretation atoms = phi(ext);
    trial.phi_is_model = is_model(atoms, kb).ok;
    Interpretation start = kb.database;
    start.insert(atoms.begin(), atoms.end());
    try {
        auto res = chase(kb.ontology, start, options.max_steps);
        if (res.outcome == ChaseResult::Outcome::Unsatisfiable) {
            trial.outcome = ProbeTrial::Outcome::Unsatisfiable;
            trial.violation = res.violation;
            for (const auto& b : kb.ontology.constraints[res.violation->constraint].body)
                trial.witness_atoms.push_back(substitute(b, res.violation->grounding));
        } else if (res.outcome == ChaseResult::Outcome::ResourceExceeded) {
            trial.outcome = ProbeTrial::Outcome::Error;
            trial.note = "chase step budget exhausted";
        }
    } catch (const NotGuaranteedTerminating& e) {
        trial.outcome = ProbeTrial::Outcome::Error;
        trial.note = e.what();
    }
    return trial;
}

}  // namespace

Point BodyPolytope::point_of(const Point& joint, const std::string& variable) const {
    auto it = std::find(variables.begin(), variables.end(), variable);
    if (it == variables.end()) throw std::out_of_range("unknown body variable " + variable);
    const auto i = static_cast<std::size_t>(it - variables.begin());
    return Point(joint.begin() + static_cast<std::ptrdiff_t>(i * m),
                 joint.begin() + static_cast<std::ptrdiff_t>((i + 1) * m));
}

BodyPolytope body_polytope(const GeometricInterpretation& eta, const std::vector<Atom>& body,
                           const ExactCheckLimits& limits) {
    const std::size_t m = eta.m;
    BodyPolytope out;
    out.m = m;
    std::map<std::string, std::pair<std::size_t, std::size_t>> first;
    for (std::size_t t = 0; t < body.size(); ++t)
        for (std::size_t p = 0; p < body[t].args.size(); ++p) {
            const Term& x = body[t].args[p];
            if (x.is_variable() && first.emplace(x.name, std::make_pair(t, p)).second) out.variables.push_back(x.name);
        }
    const std::size_t dim = out.variables.size() * m;

    std::vector<Polytope> regions;
    std::vector<std::size_t> offset;
    std::size_t n = 0;
    for (const auto& a : body) {
        regions.push_back(checked_region(eta, a));
        if (regions.back().empty()) {
            out.polytope = Polytope(dim);
            return out;
        }
        offset.push_back(n);
        n += regions.back().vertices().size();
    }
    if (n > limits.max_weights)
        throw DimensionCapExceeded("body needs " + std::to_string(n) + " convex weights, limit " +
                                   std::to_string(limits.max_weights));

    // Coefficients of coordinate c of argument p of atom t, as a row over all weights.
    auto coordinate = [&](std::size_t t, std::size_t p, std::size_t c, RationalVector& row, int sign) {
        const auto& w = regions[t].vertices();
        for (std::size_t j = 0; j < w.size(); ++j)
            if (w[j][p * m + c] != 0) row[offset[t] + j] += sign * w[j][p * m + c];
    };
    RationalMatrix a;
    RationalVector b;
    for (std::size_t t = 0; t < body.size(); ++t) {
        RationalVector row(n, Rational(0));
        for (std::size_t j = 0; j < regions[t].vertices().size(); ++j) row[offset[t] + j] = 1;
        a.push_back(std::move(row));
        b.push_back(1);
        for (std::size_t p = 0; p < body[t].args.size(); ++p) {
            const Term& x = body[t].args[p];
            if (x.is_variable() && first.at(x.name) == std::make_pair(t, p)) continue;
            for (std::size_t c = 0; c < m; ++c) {
                RationalVector r(n, Rational(0));
                coordinate(t, p, c, r, 1);
                if (x.is_variable()) {
                    const auto [t0, p0] = first.at(x.name);
                    coordinate(t0, p0, c, r, -1);
                    b.push_back(0);
                } else {
                    b.push_back(entity_point(eta, x)[c]);
                }
                a.push_back(std::move(r));
            }
        }
    }

    auto sol = solve_affine(a, b, n);
    if (!sol) {
        out.polytope = Polytope(dim);
        return out;
    }
    const std::size_t k = sol->kernel.size();
    RationalMatrix g(n, RationalVector(k));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) g[i][j] = sol->kernel[j][i];
    std::vector<RationalVector> params;
    try {
        if (k == 0) {
            if (std::all_of(sol->particular.begin(), sol->particular.end(), [](const Rational& x) { return x >= 0; }))
                params.emplace_back();
        } else {
            params = enumerate_vertices(g, sol->particular, k, limits.ray_limit);
        }
    } catch (const DoubleDescriptionLimit& e) {
        throw DimensionCapExceeded(e.what());
    }

    std::vector<Point> pts;
    for (const auto& tv : params) {
        RationalVector lambda = sol->particular;
        for (std::size_t j = 0; j < k; ++j)
            if (tv[j] != 0)
                for (std::size_t i = 0; i < n; ++i) lambda[i] += tv[j] * sol->kernel[j][i];
        Point x;
        x.reserve(dim);
        for (const auto& v : out.variables) {
            const auto [t, p] = first.at(v);
            const auto& w = regions[t].vertices();
            for (std::size_t c = 0; c < m; ++c) {
                Rational s = 0;
                for (std::size_t j = 0; j < w.size(); ++j)
                    if (lambda[offset[t] + j] != 0) s += lambda[offset[t] + j] * w[j][p * m + c];
                x.push_back(std::move(s));
            }
        }
        pts.push_back(std::move(x));
    }
    out.polytope = Polytope(dim, std::move(pts));
    return out;
}

RuleVerdict check_rule_geometric(const GeometricInterpretation& eta, const ExistentialRule& rule,
                                 const ExactCheckLimits& limits) {
    RuleVerdict verdict;
    BodyPolytope body;
    try {
        body = body_polytope(eta, rule.body, limits);
    } catch (const DimensionCapExceeded& e) {
        verdict.status = Status::Inconclusive;
        verdict.reason = e.what();
        return verdict;
    }
    for (const auto& v : body.polytope.vertices()) {
        const auto vals = witness_map(body, v);
        bool ok;
        if (rule.is_datalog()) {
            ok = std::all_of(rule.head.begin(), rule.head.end(), [&](const Atom& h) {
                return checked_region(eta, h).contains(head_point(eta, h, vals));
            });
        } else {
            ok = head_completable(eta, rule, vals);
        }
        if (!ok) {
            verdict.status = Status::Violated;
            verdict.witness = vals;
            verdict.reason = "body vertex outside the head region";
            return verdict;
        }
    }
    return verdict;
}

RuleVerdict check_rule_geometric(const GeometricInterpretation& eta, const NegativeConstraint& constraint,
                                 const ExactCheckLimits& limits) {
    RuleVerdict verdict;
    try {
        auto body = body_polytope(eta, constraint.body, limits);
        if (!body.polytope.empty()) {
            verdict.status = Status::Violated;
            verdict.witness = witness_map(body, body.polytope.vertices().front());
            verdict.reason = "constraint body is satisfiable";
        }
    } catch (const DimensionCapExceeded& e) {
        verdict.status = Status::Inconclusive;
        verdict.reason = e.what();
    }
    return verdict;
}

std::size_t ProbeReport::violations() const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const ProbeTrial& t) {
        return t.outcome == ProbeTrial::Outcome::Unsatisfiable;
    }));
}

std::size_t ProbeReport::errors() const {
    return static_cast<std::size_t>(std::count_if(
        trials.begin(), trials.end(), [](const ProbeTrial& t) { return t.outcome == ProbeTrial::Outcome::Error; }));
}

ProbeReport probe_extension(const GeometricInterpretation& eta, const KnowledgeBase& kb, const ProbeOptions& options) {
    ProbeReport report;
    report.seed = options.seed;
    report.trials.resize(options.trials);
    const Interpretation base = phi(eta);
    const auto n = static_cast<std::ptrdiff_t>(options.trials);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        report.trials[idx] = run_trial(eta, kb, base, options, idx);
    }
    return report;
}

ProbeReport probe_extension_serial(const GeometricInterpretation& eta, const KnowledgeBase& kb,
                                   const ProbeOptions& options) {
    ProbeReport report;
    report.seed = options.seed;
    const Interpretation base = phi(eta);
    for (std::size_t i = 0; i < options.trials; ++i) report.trials.push_back(run_trial(eta, kb, base, options, i));
    return report;
}

KnowledgeBase helly_instance(std::size_t n) {
    if (n < 2) throw MinimumN(n);
    KnowledgeBase kb;
    NegativeConstraint c;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string rel = "A" + std::to_string(i);
        kb.arities[rel] = 1;
        c.body.push_back(Atom{rel, {Term::variable("X")}});
        for (std::size_t j = 1; j <= n; ++j)
            if (i != j) kb.database.insert(Atom{rel, {Term::constant("a" + std::to_string(j))}});
    }
    kb.ontology.constraints.push_back(std::move(c));
    return kb;
}

HellyResult helly_break(const GeometricInterpretation& eta, std::size_t n) {
    const KnowledgeBase kb = helly_instance(n);
    const std::size_t m = eta.m;
    for (std::size_t j = 1; j <= n; ++j)
        if (!eta.entities.count(Term::constant("a" + std::to_string(j))))
            throw PreconditionViolated("constant a" + std::to_string(j) + " has no point");
    std::vector<Polytope> regions;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string rel = "A" + std::to_string(i);
        Polytope r = eta.region(rel);
        if (r.empty() || r.dim() != m) throw PreconditionViolated("region of " + rel + " is empty or has the wrong dimension");
        regions.push_back(std::move(r));
    }
    for (const auto& f : kb.database)
        if (!satisfies_atom(eta, f)) throw PreconditionViolated("interpretation does not satisfy " + to_string(f));

    HellyResult out;
    out.helly_guaranteed = m + 2 <= n;
    FeasibilityProblem lp;
    for (std::size_t c = 0; c < m; ++c) lp.add_free();
    for (const auto& r : regions) {
        const auto& w = r.vertices();
        const std::size_t first = lp.num_variables();
        std::vector<std::pair<std::size_t, Rational>> sum;
        for (std::size_t j = 0; j < w.size(); ++j) sum.emplace_back(lp.add_nonnegative(), Rational(1));
        lp.add_equality(std::move(sum), 1);
        for (std::size_t c = 0; c < m; ++c) {
            std::vector<std::pair<std::size_t, Rational>> row{{c, Rational(-1)}};
            for (std::size_t j = 0; j < w.size(); ++j)
                if (w[j][c] != 0) row.emplace_back(first + j, w[j][c]);
            lp.add_equality(std::move(row), 0);
        }
    }
    auto sol = lp.solve();
    if (!sol) return out;
    out.point = Point(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(m));

    out.fresh_constant = "d";
    for (std::size_t k = 1; eta.entities.count(Term::constant(out.fresh_constant)); ++k)
        out.fresh_constant = "d" + std::to_string(k);
    auto ext = extend_with_points(eta, {{Term::constant(out.fresh_constant), *out.point}});
    Interpretation start = kb.database;
    const auto atoms = phi(ext);
    start.insert(atoms.begin(), atoms.end());
    out.certificate = chase(kb.ontology, start);
    return out;
}

std::string to_string(ProbeTrial::Outcome outcome) {
    switch (outcome) {
        case ProbeTrial::Outcome::Satisfiable: return "satisfiable";
        case ProbeTrial::Outcome::Unsatisfiable: return "unsatisfiable";
        case ProbeTrial::Outcome::Error: return "error";
    }
    return "unknown";
}

namespace {

Json atom_json(const Atom& a) {
    Json args = Json::array();
    for (const auto& t : a.args) args.push_back(t.name);
    return Json{{"rel", a.relation}, {"args", args}};
}

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("probe report lacks \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw FormatError(std::string("probe report field \"") + key + "\" has the wrong type");
    }
}

Term ground_term(const std::string& name) {
    if (name.empty() || std::isupper(static_cast<unsigned char>(name[0])))
        throw FormatError("probe report names must be objects, got \"" + name + "\"");
    return object_from_name(name);
}

}  // namespace

std::string dump_probe_json(const ProbeReport& report) {
    Json trials = Json::array();
    for (const auto& t : report.trials) {
        Json points = Json::object();
        for (const auto& [name, p] : t.points) {
            Json coords = Json::array();
            for (const auto& x : p) coords.push_back(format_rational(x));
            points[name.name] = coords;
        }
        Json violation = nullptr;
        if (t.violation) {
            Json grounding = Json::object();
            for (const auto& [v, term] : t.violation->grounding) grounding[v] = term.name;
            violation = Json{{"constraint", t.violation->constraint}, {"grounding", grounding}};
        }
        Json witness = Json::array();
        for (const auto& a : t.witness_atoms) witness.push_back(atom_json(a));
        trials.push_back(Json{{"index", t.index},
                              {"points", points},
                              {"nulls_created", t.nulls_created},
                              {"phi_is_model", t.phi_is_model},
                              {"outcome", to_string(t.outcome)},
                              {"violation", violation},
                              {"witness_atoms", witness},
                              {"note", t.note}});
    }
    Json doc{{"seed", report.seed}, {"violations", report.violations()}, {"errors", report.errors()},
             {"trials", trials}};
    return doc.dump(2) + "\n";
}

ProbeReport load_probe_json(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("probe report is not valid JSON: ") + e.what());
    }
    ProbeReport report;
    report.seed = field<std::uint64_t>(doc, "seed");
    const Json trials = field<Json>(doc, "trials");
    if (!trials.is_array()) throw FormatError("probe report \"trials\" must be an array");
    std::size_t dim = 0;
    bool dim_known = false;
    for (const auto& j : trials) {
        ProbeTrial t;
        t.index = field<std::size_t>(j, "index");
        const Json points = field<Json>(j, "points");
        if (!points.is_object()) throw FormatError("probe trial \"points\" must be an object");
        for (const auto& [name, coords] : points.items()) {
            if (!coords.is_array()) throw FormatError("point of " + name + " must be an array");
            if (!dim_known) dim = coords.size(), dim_known = true;
            if (coords.size() != dim) throw FormatError("points of a probe report differ in dimension");
            Point p;
            for (const auto& x : coords) {
                if (!x.is_string()) throw FormatError("coordinates must be rational strings");
                try {
                    p.push_back(parse_rational(x.get<std::string>()));
                } catch (const std::invalid_argument& e) {
                    throw FormatError(e.what());
                }
            }
            t.points.emplace(ground_term(name), std::move(p));
        }
        t.nulls_created = field<std::size_t>(j, "nulls_created");
        t.phi_is_model = field<bool>(j, "phi_is_model");
        const auto outcome = field<std::string>(j, "outcome");
        if (outcome == "satisfiable")
            t.outcome = ProbeTrial::Outcome::Satisfiable;
        else if (outcome == "unsatisfiable")
            t.outcome = ProbeTrial::Outcome::Unsatisfiable;
        else if (outcome == "error")
            t.outcome = ProbeTrial::Outcome::Error;
        else
            throw FormatError("unknown trial outcome \"" + outcome + "\"");
        const Json violation = field<Json>(j, "violation");
        if (!violation.is_null()) {
            ConstraintViolation v;
            v.constraint = field<std::size_t>(violation, "constraint");
            const Json grounding = field<Json>(violation, "grounding");
            if (!grounding.is_object()) throw FormatError("violation grounding must be an object");
            for (const auto& [var, name] : grounding.items()) {
                if (!name.is_string()) throw FormatError("grounding values must be names");
                v.grounding[var] = ground_term(name.get<std::string>());
            }
            t.violation = std::move(v);
        }
        const Json witness = field<Json>(j, "witness_atoms");
        if (!witness.is_array()) throw FormatError("\"witness_atoms\" must be an array");
        for (const auto& a : witness) {
            Atom atom{field<std::string>(a, "rel"), {}};
            for (const auto& name : field<std::vector<std::string>>(a, "args")) atom.args.push_back(ground_term(name));
            t.witness_atoms.push_back(std::move(atom));
        }
        t.note = field<std::string>(j, "note");
        report.trials.push_back(std::move(t));
    }
    return report;
}

}  // namespace geomodel
