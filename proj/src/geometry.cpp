#include "geomodel/geometry.hpp"

#include <algorithm>

#include "geomodel/lp.hpp"
#include "json.hpp"

namespace geomodel {

namespace {

using Json = nlohmann::ordered_json;

const Point& point_of(const GeometricInterpretation& eta, const Term& t) {
    auto it = eta.entities.find(t);
    if (it == eta.entities.end()) throw UnknownObject(t.name);
    return it->second;
}

Point tuple_point(const GeometricInterpretation& eta, const std::vector<Term>& args) {
    Point out;
    out.reserve(args.size() * eta.m);
    for (const auto& t : args) {
        const auto& p = point_of(eta, t);
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

bool skip_relation(const std::string& rel, bool include_auxiliary) {
    return !include_auxiliary && is_auxiliary_relation(rel);
}

// Calls `visit` with every index tuple in the product of `choices`.
template <class F>
void for_each_tuple(const std::vector<std::vector<std::size_t>>& choices, F&& visit) {
    for (const auto& c : choices)
        if (c.empty()) return;
    std::vector<std::size_t> pos(choices.size(), 0);
    std::vector<std::size_t> tuple(choices.size());
    while (true) {
        for (std::size_t i = 0; i < choices.size(); ++i) tuple[i] = choices[i][pos[i]];
        visit(tuple);
        std::size_t i = choices.size();
        while (i > 0) {
            --i;
            if (++pos[i] < choices[i].size()) break;
            pos[i] = 0;
            if (i == 0) return;
        }
        if (choices.empty()) return;
    }
}

bool on_unit_sum_hyperplane(const Point& p, std::size_t begin, std::size_t m) {
    Rational s = 0;
    for (std::size_t i = 0; i < m; ++i) s += p[begin + i];
    return s == 1;
}

Json rational_array(const RationalVector& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(format_rational(x));
    return out;
}

RationalVector parse_rational_array(const Json& j, std::size_t expected) {
    if (!j.is_array() || j.size() != expected)
        throw FormatError("expected an array of " + std::to_string(expected) + " rationals");
    RationalVector out;
    for (const auto& x : j) {
        if (!x.is_string()) throw FormatError("rationals must be written as strings");
        try {
            out.push_back(parse_rational(x.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw FormatError(e.what());
        }
    }
    return out;
}

}  // namespace

Polytope GeometricInterpretation::region(const std::string& relation) const {
    auto it = regions.find(relation);
    if (it != regions.end()) return it->second;
    auto ar = arities.find(relation);
    return Polytope(ar == arities.end() ? 0 : ar->second * m);
}

std::vector<Term> GeometricInterpretation::objects() const {
    std::vector<Term> out;
    for (const auto& [t, p] : entities) out.push_back(t);
    return out;
}

bool satisfies_atom(const GeometricInterpretation& eta, const Atom& atom) {
    const Point x = tuple_point(eta, atom.args);
    auto it = eta.regions.find(atom.relation);
    if (it == eta.regions.end()) return false;
    return it->second.contains(x);
}

Interpretation phi(const GeometricInterpretation& eta, const std::vector<Term>& objects,
                   bool include_auxiliary) {
    std::vector<const Point*> pts;
    for (const auto& o : objects) pts.push_back(&point_of(eta, o));

    struct Job {
        const std::string* relation;
        const Polytope* region;
        std::vector<std::size_t> tuple;
    };
    std::vector<Job> jobs;
    for (const auto& [rel, arity] : eta.arities) {
        if (skip_relation(rel, include_auxiliary)) continue;
        auto it = eta.regions.find(rel);
        if (it == eta.regions.end() || it->second.empty()) continue;
        const Polytope& region = it->second;
        std::vector<std::vector<std::size_t>> choices(arity);
        for (std::size_t j = 0; j < arity; ++j) {
            const Polytope block = region.project(j * eta.m, eta.m);
            for (std::size_t o = 0; o < objects.size(); ++o)
                if (block.contains(*pts[o])) choices[j].push_back(o);
        }
        for_each_tuple(choices, [&](const std::vector<std::size_t>& t) { jobs.push_back({&it->first, &region, t}); });
    }

    std::vector<char> hit(jobs.size(), 0);
    const auto njobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < njobs; ++i) {
        const auto& job = jobs[static_cast<std::size_t>(i)];
        Point x;
        for (auto o : job.tuple) x.insert(x.end(), pts[o]->begin(), pts[o]->end());
        hit[static_cast<std::size_t>(i)] = job.region->contains(x) ? 1 : 0;
    }

    Interpretation out;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!hit[i]) continue;
        Atom a{*jobs[i].relation, {}};
        for (auto o : jobs[i].tuple) a.args.push_back(objects[o]);
        out.insert(std::move(a));
    }
    return out;
}

Interpretation phi(const GeometricInterpretation& eta) {
    return phi(eta, eta.objects());
}

Interpretation phi_serial(const GeometricInterpretation& eta, const std::vector<Term>& objects,
                          bool include_auxiliary) {
    Interpretation out;
    for (const auto& [rel, arity] : eta.arities) {
        if (skip_relation(rel, include_auxiliary)) continue;
        std::vector<std::vector<std::size_t>> all(arity);
        for (auto& c : all)
            for (std::size_t o = 0; o < objects.size(); ++o) c.push_back(o);
        for_each_tuple(all, [&](const std::vector<std::size_t>& t) {
            Atom a{rel, {}};
            for (auto o : t) a.args.push_back(objects[o]);
            if (satisfies_atom(eta, a)) out.insert(std::move(a));
        });
    }
    return out;
}

GeometricInterpretation build_prop3_model(const Interpretation& model, const std::set<Term>& extra_objects,
                                          const std::map<std::string, std::size_t>& arities) {
    GeometricInterpretation eta;
    std::set<Term, ObjectOrder> objs(extra_objects.begin(), extra_objects.end());
    for (const auto& a : model) objs.insert(a.args.begin(), a.args.end());
    eta.m = objs.size();
    std::size_t i = 0;
    for (const auto& o : objs) {
        Point e(eta.m, Rational(0));
        e[i++] = 1;
        eta.entities.emplace(o, std::move(e));
    }
    eta.arities = arities;
    std::map<std::string, std::vector<Point>> pts;
    for (const auto& a : model) {
        record_arities({a}, eta.arities);
        pts[a.relation].push_back(tuple_point(eta, a.args));
    }
    for (const auto& [rel, arity] : eta.arities) eta.regions.emplace(rel, Polytope(arity * eta.m, std::move(pts[rel])));
    return eta;
}

GeometricInterpretation extend_with_points(const GeometricInterpretation& eta, const EntityMap& points) {
    GeometricInterpretation out = eta;
    for (const auto& [t, p] : points) {
        if (p.size() != eta.m) throw DimensionMismatch(eta.m, p.size());
        if (!out.entities.emplace(t, p).second) throw NameCollision(t.name);
    }
    return out;
}

WitnessSynthesis synthesize_null_witnesses(const GeometricInterpretation& eta, const Interpretation& base,
                                           const KnowledgeBase& kb, std::size_t max_rounds) {
    struct Demand {
        std::size_t rule;
        std::vector<std::string> vars;
        std::vector<Substitution> matches;
        std::vector<Substitution> witnesses;
    };
    std::vector<Demand> rules;
    for (std::size_t r = 0; r < kb.ontology.rules.size(); ++r) {
        const auto& rule = kb.ontology.rules[r];
        if (rule.is_datalog()) continue;
        Demand d{r, {}, all_matches(rule.body, base), {}};
        const auto bv = rule.body_variables();
        d.vars.assign(bv.begin(), bv.end());
        for (const auto& m : d.matches) {
            auto heads = all_matches(rule.head, base, m);
            if (heads.empty()) throw NotProp3Base("base model violates " + render(rule));
            d.witnesses.push_back(heads.front());
        }
        rules.push_back(std::move(d));
    }

    WitnessSynthesis out{eta, {}, 0};
    std::size_t next_null = 1;
    for (const auto& [t, p] : eta.entities)
        if (t.kind == TermKind::Null)
            if (auto i = null_index(t.name)) next_null = std::max(next_null, *i + 1);

    while (true) {
        const Interpretation current = phi(out.eta);
        std::vector<std::pair<const Demand*, Substitution>> open;
        for (const auto& d : rules) {
            const auto& rule = kb.ontology.rules[d.rule];
            for (const auto& m : all_matches(rule.body, current)) {
                bool satisfied = false;
                for_each_match(rule.head, current, m, [&](const Substitution&) {
                    satisfied = true;
                    return false;
                });
                if (!satisfied) open.emplace_back(&d, m);
            }
        }
        if (open.empty()) return out;
        if (out.rounds == max_rounds) throw RoundsExceeded(max_rounds);
        ++out.rounds;

        EntityMap fresh;
        for (const auto& [d, m] : open) {
            const auto& rule = kb.ontology.rules[d->rule];
            std::vector<Term> args;
            for (const auto& v : d->vars) args.push_back(m.at(v));
            const Point y = tuple_point(out.eta, args);
            const std::size_t n = d->matches.size();
            RationalMatrix a(y.size() + 1, RationalVector(n, Rational(0)));
            RationalVector b(y);
            b.push_back(1);
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Term> bargs;
                for (const auto& v : d->vars) bargs.push_back(d->matches[j].at(v));
                const Point yj = tuple_point(out.eta, bargs);
                for (std::size_t i = 0; i < y.size(); ++i) a[i][j] = yj[i];
                a[y.size()][j] = 1;
            }
            auto lambda = solve_nonnegative(a, b, n);
            if (!lambda)
                throw NotProp3Base("body tuple of " + render(rule) + " is not a convex combination of base matches");
            for (const auto& z : rule.evars) {
                Point p(out.eta.m, Rational(0));
                for (std::size_t j = 0; j < n; ++j) {
                    if ((*lambda)[j] == 0) continue;
                    const Point& u = point_of(out.eta, d->witnesses[j].at(z));
                    for (std::size_t i = 0; i < p.size(); ++i) p[i] += (*lambda)[j] * u[i];
                }
                Term null = Term::null(null_name(next_null++));
                fresh.emplace(null, std::move(p));
                out.created.emplace_back(null, *lambda);
            }
        }
        out.eta = extend_with_points(out.eta, fresh);
    }
}

GeometricInterpretation compact_datalog_model(const GeometricInterpretation& eta) {
    if (eta.m == 0) throw NotProp3Base("a zero-dimensional model has no unit-sum chart");
    const std::size_t m = eta.m;
    GeometricInterpretation out;
    out.m = m - 1;
    out.arities = eta.arities;
    for (const auto& [t, p] : eta.entities) {
        if (!on_unit_sum_hyperplane(p, 0, m)) throw NotProp3Base("point of " + t.name + " is off the unit-sum hyperplane");
        out.entities.emplace(t, Point(p.begin(), p.end() - 1));
    }
    for (const auto& [rel, poly] : eta.regions) {
        const std::size_t k = eta.arities.at(rel);
        std::vector<Point> pts;
        for (const auto& v : poly.vertices()) {
            Point q;
            for (std::size_t j = 0; j < k; ++j) {
                if (!on_unit_sum_hyperplane(v, j * m, m))
                    throw NotProp3Base("region of " + rel + " leaves the unit-sum hyperplane");
                q.insert(q.end(), v.begin() + static_cast<std::ptrdiff_t>(j * m),
                         v.begin() + static_cast<std::ptrdiff_t>(j * m + m - 1));
            }
            pts.push_back(std::move(q));
        }
        out.regions.emplace(rel, Polytope(k * out.m, std::move(pts)));
    }
    return out;
}

Rational ExtendedGeometricInterpretation::transform(const std::string& relation, const RationalVector& x) const {
    auto it = table.find(relation);
    return it != table.end() && it->second.count(x) ? Rational(1) : Rational(0);
}

bool ExtendedGeometricInterpretation::satisfies_atom(const Atom& atom) const {
    RationalVector x;
    for (const auto& t : atom.args) {
        auto it = entities.find(t);
        if (it == entities.end()) throw UnknownObject(t.name);
        x.push_back(it->second);
    }
    return transform(atom.relation, x) == 1;
}

Interpretation ExtendedGeometricInterpretation::phi() const {
    std::vector<Term> objs;
    for (const auto& [t, x] : entities) objs.push_back(t);
    Interpretation out;
    for (const auto& [rel, arity] : arities) {
        std::vector<std::vector<std::size_t>> all(arity);
        for (auto& c : all)
            for (std::size_t o = 0; o < objs.size(); ++o) c.push_back(o);
        for_each_tuple(all, [&](const std::vector<std::size_t>& t) {
            Atom a{rel, {}};
            for (auto o : t) a.args.push_back(objs[o]);
            if (satisfies_atom(a)) out.insert(std::move(a));
        });
    }
    return out;
}

ExtendedGeometricInterpretation build_extended_trivial(const Interpretation& model) {
    ExtendedGeometricInterpretation out;
    std::size_t i = 0;
    for (const auto& o : objects(model)) out.entities.emplace(o, Rational(i++));
    for (const auto& a : model) {
        record_arities({a}, out.arities);
        RationalVector x;
        for (const auto& t : a.args) x.push_back(out.entities.at(t));
        out.table[a.relation].insert(std::move(x));
    }
    return out;
}

std::string dump_geometry_json(const GeometricInterpretation& eta) {
    Json entities = Json::object();
    for (const auto& [t, p] : eta.entities) entities[t.name] = rational_array(p);
    Json relations = Json::object();
    for (const auto& [rel, arity] : eta.arities) {
        Json verts = Json::array();
        const Polytope region = eta.region(rel);
        for (const auto& v : region.vertices()) verts.push_back(rational_array(v));
        relations[rel] = Json{{"arity", arity}, {"vertices", verts}};
    }
    Json doc{{"m", eta.m}, {"entities", entities}, {"relations", relations}};
    return doc.dump(2) + "\n";
}

GeometricInterpretation load_geometry_json(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("geometry dump is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("m") || !doc["m"].is_number_unsigned() || !doc.contains("entities") ||
        !doc["entities"].is_object() || !doc.contains("relations") || !doc["relations"].is_object())
        throw FormatError("geometry dump needs \"m\", \"entities\" and \"relations\"");
    GeometricInterpretation eta;
    eta.m = doc["m"].get<std::size_t>();
    for (const auto& [name, p] : doc["entities"].items()) {
        if (name.empty() || std::isupper(static_cast<unsigned char>(name[0])))
            throw FormatError("invalid object name '" + name + "'");
        eta.entities.emplace(object_from_name(name), parse_rational_array(p, eta.m));
    }
    for (const auto& [rel, r] : doc["relations"].items()) {
        if (!r.is_object() || !r.contains("arity") || !r["arity"].is_number_unsigned() || r["arity"] == 0 ||
            !r.contains("vertices") || !r["vertices"].is_array())
            throw FormatError("malformed relation entry " + rel);
        const auto k = r["arity"].get<std::size_t>();
        std::vector<Point> pts;
        for (const auto& v : r["vertices"]) pts.push_back(parse_rational_array(v, k * eta.m));
        eta.arities[rel] = k;
        eta.regions.emplace(rel, Polytope(k * eta.m, std::move(pts)));
    }
    return eta;
}

}  // namespace geomodel
