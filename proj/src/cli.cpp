#include "geomodel/cli.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "geomodel/embedding_limits.hpp"
#include "geomodel/rule_check.hpp"
#include "json.hpp"

namespace geomodel::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UsageError("cannot write " + path);
}

// --- numbers ------------------------------------------------------------------

struct Format {
    bool use_float = false;

    std::string num(const Rational& x) const {
        if (!use_float) return format_rational(x);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", to_double(x));
        return buf;
    }
    Json num_json(const Rational& x) const {
        if (use_float) return to_double(x);
        return format_rational(x);
    }
    std::string vec(const RationalVector& v) const {
        std::string s = "(";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
        return s + ")";
    }
    Json vec_json(const RationalVector& v) const {
        Json a = Json::array();
        for (const auto& x : v) a.push_back(num_json(x));
        return a;
    }
};

Rational parse_number(const std::string& text) {
    try {
        if (text.find_first_of(".eE") != std::string::npos) return from_double(std::stod(text));
        return parse_rational(text);
    } catch (const std::exception&) {
        throw UsageError("not a number: " + text);
    }
}

Rational json_number(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_float()) return from_double(j.get<double>());
    if (j.is_string()) return parse_number(j.get<std::string>());
    throw UsageError("expected a number, got " + j.dump());
}

Json parse_json_argument(const std::string& text) {
    const std::string body = !text.empty() && text[0] == '@' ? read_file(text.substr(1)) : text;
    try {
        return Json::parse(body);
    } catch (const Json::parse_error&) {
        throw UsageError("malformed JSON argument: " + text);
    }
}

RationalVector json_vector(const Json& j) {
    if (!j.is_array()) throw UsageError("expected a vector, got " + j.dump());
    RationalVector v;
    for (const auto& x : j) v.push_back(json_number(x));
    return v;
}

RationalMatrix json_matrix(const Json& j) {
    if (!j.is_array()) throw UsageError("expected a matrix, got " + j.dump());
    RationalMatrix m;
    for (const auto& row : j) m.push_back(json_vector(row));
    return m;
}

RationalVector vector_arg(const std::string& text) { return json_vector(parse_json_argument(text)); }
RationalMatrix matrix_arg(const std::string& text) { return json_matrix(parse_json_argument(text)); }

// --- shared rendering -------------------------------------------------------

std::string grounding_text(const Substitution& s) {
    std::string out;
    for (const auto& [v, t] : s) out += (out.empty() ? "" : ", ") + v + "=" + t.name;
    return out;
}

Json grounding_json(const Substitution& s) {
    Json g = Json::object();
    for (const auto& [v, t] : s) g[v] = t.name;
    return g;
}

Json atoms_json(const Interpretation& atoms) {
    Json a = Json::array();
    for (const auto& x : atoms) a.push_back(to_string(x));
    return a;
}

std::string outcome_name(ChaseResult::Outcome o) {
    switch (o) {
        case ChaseResult::Outcome::Model: return "model";
        case ChaseResult::Outcome::Unsatisfiable: return "unsatisfiable";
        case ChaseResult::Outcome::ResourceExceeded: return "resource-exceeded";
    }
    return "unknown";
}

int outcome_code(ChaseResult::Outcome o) {
    switch (o) {
        case ChaseResult::Outcome::Model: return kSuccess;
        case ChaseResult::Outcome::Unsatisfiable: return kViolation;
        case ChaseResult::Outcome::ResourceExceeded: return kResourceExceeded;
    }
    return kUsageError;
}

void print_chase(const KnowledgeBase& kb, const ChaseResult& res, bool json, std::ostream& out) {
    if (json) {
        Json doc{{"outcome", outcome_name(res.outcome)}, {"steps", res.steps}, {"atoms", atoms_json(res.atoms)}};
        if (res.violation)
            doc["violation"] = Json{{"constraint", render(kb.ontology.constraints[res.violation->constraint])},
                                    {"grounding", grounding_json(res.violation->grounding)}};
        out << doc.dump(2) << "\n";
        return;
    }
    out << "outcome: " << outcome_name(res.outcome) << " (" << res.atoms.size() << " atoms, " << res.steps
        << " steps)\n";
    if (res.violation) {
        out << "violated: " << render(kb.ontology.constraints[res.violation->constraint]) << "\n";
        out << "grounding: " << grounding_text(res.violation->grounding) << "\n";
    }
    if (res.outcome == ChaseResult::Outcome::Model)
        for (const auto& a : res.atoms) out << to_string(a) << ".\n";
}

// --- verbs ----------------------------------------------------------------------

struct Common {
    bool json = false;
    bool use_float = false;
    std::string output;
    Format fmt() const { return Format{use_float}; }
};

int cmd_parse(const std::string& file, const Common& c, std::ostream& out) {
    const auto kb = parse_program(read_file(file));
    const std::string text = render(kb);
    if (!c.output.empty()) write_file(c.output, text);
    if (c.json) {
        const auto f = classify(kb.ontology);
        Json ar = Json::object();
        for (const auto& [r, k] : kb.arities) ar[r] = k;
        out << Json{{"facts", kb.database.size()},
                    {"rules", kb.ontology.rules.size()},
                    {"constraints", kb.ontology.constraints.size()},
                    {"arities", ar},
                    {"fragments",
                     {{"datalog", f.datalog},
                      {"linear", f.linear},
                      {"guarded", f.guarded},
                      {"weakly_acyclic", f.weakly_acyclic},
                      {"quasi_chained", f.quasi_chained}}},
                    {"program", text}}
                   .dump(2)
            << "\n";
    } else if (c.output.empty()) {
        out << text;
    }
    return kSuccess;
}

int cmd_qc(const std::string& file, const Common& c, std::ostream& out) {
    const auto kb = parse_program(read_file(file));
    Json items = Json::array();
    bool all = true;
    auto report = [&](const std::string& kind, std::size_t i, const std::string& text, const QcResult& qc) {
        all &= qc.quasi_chained;
        Json order = Json::array();
        for (auto k : qc.order) order.push_back(k + 1);
        items.push_back(Json{{"kind", kind},
                             {"index", i + 1},
                             {"text", text},
                             {"quasi_chained", qc.quasi_chained},
                             {"order", order}});
        if (c.json) return;
        out << kind << " " << i + 1 << ": " << (qc.quasi_chained ? "quasi-chained" : "NOT quasi-chained");
        if (qc.quasi_chained) {
            out << ", order";
            for (auto k : qc.order) out << " " << k + 1;
        }
        out << "  " << text << "\n";
    };
    for (std::size_t i = 0; i < kb.ontology.rules.size(); ++i)
        report("rule", i, render(kb.ontology.rules[i]), is_quasi_chained(kb.ontology.rules[i]));
    for (std::size_t i = 0; i < kb.ontology.constraints.size(); ++i)
        report("constraint", i, render(kb.ontology.constraints[i]), is_quasi_chained(kb.ontology.constraints[i]));
    const bool wa = is_weakly_acyclic(kb.ontology);
    if (c.json)
        out << Json{{"quasi_chained", all}, {"weakly_acyclic", wa}, {"statements", items}}.dump(2) << "\n";
    else
        out << "quasi-chained: " << (all ? "yes" : "no") << "\nweakly acyclic: " << (wa ? "yes" : "no") << "\n";
    return all ? kSuccess : kViolation;
}

int cmd_chase(const std::string& file, std::size_t max_steps, const Common& c, std::ostream& out) {
    const auto kb = parse_program(read_file(file));
    const auto res = chase(kb, max_steps);
    if (!c.output.empty() && res.outcome == ChaseResult::Outcome::Model) write_file(c.output, dump_model_json(res.atoms));
    print_chase(kb, res, c.json, out);
    return outcome_code(res.outcome);
}

int cmd_embed(const std::string& file, std::size_t max_steps, bool compact, const Common& c, std::ostream& out,
              std::ostream& err) {
    const auto kb = parse_program(read_file(file));
    const auto res = chase(kb, max_steps);
    if (res.outcome != ChaseResult::Outcome::Model) {
        err << "no model to embed: chase outcome " << outcome_name(res.outcome) << "\n";
        if (res.violation) err << "violated: " << render(kb.ontology.constraints[res.violation->constraint]) << "\n";
        return outcome_code(res.outcome);
    }
    auto eta = build_prop3_model(res.atoms, kb.constants(), kb.arities);
    if (compact) eta = compact_datalog_model(eta);
    const std::string text = dump_geometry_json(eta);
    if (c.output.empty()) {
        out << text;
        return kSuccess;
    }
    write_file(c.output, text);
    if (c.json)
        out << Json{{"output", c.output}, {"m", eta.m}, {"objects", eta.entities.size()}, {"atoms", res.atoms.size()}}
                   .dump(2)
            << "\n";
    else
        out << "wrote " << c.output << ": m = " << eta.m << ", " << eta.entities.size() << " objects, "
            << res.atoms.size() << " atoms\n";
    return kSuccess;
}

struct Loaded {
    GeometricInterpretation eta;
    KnowledgeBase kb;
};

Loaded load_pair(const std::string& geometry, const std::string& program) {
    return {load_geometry_json(read_file(geometry)), parse_program(read_file(program))};
}

int cmd_verify(const std::string& geometry, const std::string& program, std::size_t max_steps, const Common& c,
               std::ostream& out, std::ostream& err) {
    const auto [eta, kb] = load_pair(geometry, program);
    const auto res = chase(kb, max_steps);
    if (res.outcome != ChaseResult::Outcome::Model) {
        err << "program has no chase model: " << outcome_name(res.outcome) << "\n";
        return outcome_code(res.outcome);
    }
    const auto got = phi(eta);
    const bool exact = got == res.atoms;
    const bool equal = exact || equal_up_to_null_renaming(got, res.atoms);
    Interpretation missing, extra;
    for (const auto& a : res.atoms)
        if (!got.count(a)) missing.insert(a);
    for (const auto& a : got)
        if (!res.atoms.count(a)) extra.insert(a);
    if (c.json) {
        Json doc{{"equal", equal}, {"exact", exact}, {"phi_atoms", got.size()}, {"model_atoms", res.atoms.size()}};
        if (!equal) {
            doc["missing"] = atoms_json(missing);
            doc["extra"] = atoms_json(extra);
        }
        out << doc.dump(2) << "\n";
    } else {
        out << "phi == M: " << (equal ? "true" : "false");
        if (equal && !exact) out << " (up to null renaming)";
        out << "\n";
        if (!equal) {
            for (const auto& a : missing) out << "missing: " << to_string(a) << "\n";
            for (const auto& a : extra) out << "extra: " << to_string(a) << "\n";
        }
    }
    return equal ? kSuccess : kViolation;
}

std::string status_name(RuleVerdict::Status s) {
    switch (s) {
        case RuleVerdict::Status::Satisfied: return "satisfied";
        case RuleVerdict::Status::Violated: return "violated";
        case RuleVerdict::Status::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

int cmd_check_rules(const std::string& geometry, const std::string& program, const Common& c, std::ostream& out) {
    const auto [eta, kb] = load_pair(geometry, program);
    const Format f = c.fmt();
    Json items = Json::array();
    bool violated = false, inconclusive = false;
    auto report = [&](const std::string& text, const RuleVerdict& v) {
        violated |= v.status == RuleVerdict::Status::Violated;
        inconclusive |= v.status == RuleVerdict::Status::Inconclusive;
        Json w = Json::object();
        for (const auto& [var, p] : v.witness) w[var] = f.vec_json(p);
        items.push_back(Json{{"statement", text}, {"status", status_name(v.status)}, {"witness", w}, {"reason", v.reason}});
        if (c.json) return;
        out << status_name(v.status) << ": " << text;
        if (!v.witness.empty()) {
            out << "  at";
            for (const auto& [var, p] : v.witness) out << " " << var << "=" << f.vec(p);
        }
        if (v.status == RuleVerdict::Status::Inconclusive) out << "  (" << v.reason << ")";
        out << "\n";
    };
    for (const auto& r : kb.ontology.rules) report(render(r), check_rule_geometric(eta, r));
    for (const auto& k : kb.ontology.constraints) report(render(k), check_rule_geometric(eta, k));
    if (c.json) out << Json{{"satisfied", !violated && !inconclusive}, {"statements", items}}.dump(2) << "\n";
    return violated ? kViolation : inconclusive ? kResourceExceeded : kSuccess;
}

int cmd_probe(const std::string& geometry, const std::string& program, const ProbeOptions& opt,
              const std::string& sampler, const Common& c, std::ostream& out) {
    const auto [eta, kb] = load_pair(geometry, program);
    const auto report = probe_extension(eta, kb, opt);
    const std::string dump = dump_probe_json(report);
    if (!c.output.empty()) write_file(c.output, dump);
    const Format f = c.fmt();
    if (c.json) {
        out << dump;
    } else {
        out << "seed: " << opt.seed << "\ntrials: " << opt.trials << "\npoints per trial: " << opt.points
            << "\nsampler: " << sampler << "\nunsatisfiable extensions: " << report.violations()
            << "\nerrors: " << report.errors() << "\n";
        for (const auto& t : report.trials) {
            if (t.outcome == ProbeTrial::Outcome::Satisfiable) continue;
            out << "trial " << t.index << ": " << to_string(t.outcome) << ", points";
            for (const auto& [name, p] : t.points) out << " " << name.name << "=" << f.vec(p);
            out << "\n";
            if (t.violation) {
                out << "  violated " << render(kb.ontology.constraints[t.violation->constraint]) << " by";
                for (const auto& a : t.witness_atoms) out << " " << to_string(a);
                out << "\n";
            }
            if (!t.note.empty()) out << "  " << t.note << "\n";
        }
    }
    if (report.violations() > 0) return kViolation;
    return report.errors() > 0 ? kResourceExceeded : kSuccess;
}

GeometricInterpretation helly_interpretation(std::size_t n, std::size_t dim, std::uint64_t seed) {
    const auto kb = helly_instance(n);
    if (dim + 1 >= n) {
        // Unit vectors in R^n, moved to the hyperplane chart for dim n - 1 or padded beyond n.
        auto eta = build_prop3_model(kb.database, {}, kb.arities);
        if (dim + 1 == n) return compact_datalog_model(eta);
        GeometricInterpretation padded;
        padded.m = dim;
        padded.arities = eta.arities;
        for (auto [t, p] : eta.entities) {
            p.resize(dim, Rational(0));
            padded.entities.emplace(t, p);
        }
        for (const auto& [rel, region] : eta.regions) {
            std::vector<Point> v = region.vertices();
            for (auto& p : v) p.resize(dim, Rational(0));
            padded.regions.emplace(rel, Polytope(dim, v));
        }
        return padded;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> c(-5, 5);
    auto point = [&] {
        Point p(dim);
        for (auto& x : p) x = c(rng);
        return p;
    };
    GeometricInterpretation eta;
    eta.m = dim;
    eta.arities = kb.arities;
    std::vector<Point> pts;
    for (std::size_t j = 1; j <= n; ++j) {
        pts.push_back(point());
        eta.entities.emplace(Term::constant("a" + std::to_string(j)), pts.back());
    }
    for (std::size_t i = 1; i <= n; ++i) {
        std::vector<Point> gens;
        for (std::size_t j = 1; j <= n; ++j)
            if (j != i) gens.push_back(pts[j - 1]);
        for (std::uint64_t extra = rng() % 3; extra > 0; --extra) gens.push_back(point());
        eta.regions.emplace("A" + std::to_string(i), Polytope(dim, gens));
    }
    return eta;
}

int cmd_helly(std::size_t n, std::size_t dim, std::uint64_t seed, const Common& c, std::ostream& out) {
    if (dim == 0) throw UsageError("--dim must be positive");
    const auto kb = helly_instance(n);
    const auto eta = helly_interpretation(n, dim, seed);
    if (!c.output.empty()) write_file(c.output, dump_geometry_json(eta));
    const auto res = helly_break(eta, n);
    const auto verdict = check_rule_geometric(eta, kb.ontology.constraints[0]);
    const Format f = c.fmt();
    const bool broken = res.certificate && res.certificate->outcome == ChaseResult::Outcome::Unsatisfiable;
    if (c.json) {
        Json doc{{"n", n},
                 {"dim", dim},
                 {"seed", seed},
                 {"helly_guaranteed", res.helly_guaranteed},
                 {"point", res.point ? f.vec_json(*res.point) : Json(nullptr)},
                 {"constraint_check", status_name(verdict.status)}};
        if (res.point) {
            doc["fresh_constant"] = res.fresh_constant;
            doc["certificate"] = Json{{"outcome", outcome_name(res.certificate->outcome)}};
            if (res.certificate->violation)
                doc["certificate"]["grounding"] = grounding_json(res.certificate->violation->grounding);
        }
        out << doc.dump(2) << "\n";
    } else {
        out << "instance: n = " << n << ", dim = " << dim << ", seed = " << seed << "\n";
        out << "common point guaranteed: " << (res.helly_guaranteed ? "yes" : "no") << "\n";
        if (res.point) {
            out << "helly point: " << f.vec(*res.point) << "\n";
            out << "extension by " << res.fresh_constant << ": " << outcome_name(res.certificate->outcome) << "\n";
            if (res.certificate->violation)
                out << "violated: " << render(kb.ontology.constraints[0]) << " with "
                    << grounding_text(res.certificate->violation->grounding) << "\n";
        } else {
            out << "no common point\n";
        }
        out << "constraint check: " << status_name(verdict.status) << "\n";
    }
    return broken ? kViolation : kSuccess;
}

// --- limits -------------------------------------------------------------------

int cmd_bilinear(const std::string& mr_text, const std::string& lr_text, const std::string& ms_text,
                 const std::string& ls_text, std::size_t samples, std::uint64_t seed, const Common& c,
                 std::ostream& out) {
    const auto mr = matrix_arg(mr_text), ms = matrix_arg(ms_text);
    const Rational lr = parse_number(lr_text), ls = parse_number(ls_text);
    const auto d = bilinear_rule_decision(mr, lr, ms, ls);
    const Format f = c.fmt();
    std::optional<FalsificationReport> fr;
    if (d.satisfied() && samples > 0) fr = falsify_bilinear(mr, lr, ms, ls, samples, seed);
    if (c.json) {
        Json doc{{"verdict", d.satisfied() ? "satisfied" : "counterexample"}, {"seed", seed}};
        if (d.alpha) doc["alpha"] = f.num_json(*d.alpha);
        if (d.satisfied()) {
            doc["reason"] = to_string(d.reason);
        } else {
            doc["construction"] = d.construction;
            doc["e"] = f.vec_json(d.e);
            doc["f"] = f.vec_json(d.f);
            doc["body_value"] = f.num_json(bilinear_form(mr, d.e, d.f));
            doc["head_value"] = f.num_json(bilinear_form(ms, d.e, d.f));
        }
        if (fr) doc["falsification"] = Json{{"samples", fr->samples}, {"violations", fr->violations}};
        out << doc.dump(2) << "\n";
    } else {
        out << "seed: " << seed << "\n";
        if (d.satisfied()) {
            out << "satisfied (" << to_string(d.reason) << ")";
            if (d.alpha) out << ", alpha = " << f.num(*d.alpha);
            out << "\n";
            if (fr) out << "falsification: " << fr->violations << " violations in " << fr->samples << " samples\n";
        } else {
            out << "counterexample (" << d.construction << ")\ne = " << f.vec(d.e) << "\nf = " << f.vec(d.f)
                << "\ne^T M_r f = " << f.num(bilinear_form(mr, d.e, d.f)) << " >= " << f.num(lr)
                << "\ne^T M_s f = " << f.num(bilinear_form(ms, d.e, d.f)) << " < " << f.num(ls) << "\n";
        }
    }
    return d.satisfied() && (!fr || fr->violations == 0) ? kSuccess : kViolation;
}

int cmd_hierarchy(const std::string& relations_text, const std::string& ms_text, const std::string& ls_text,
                  const Common& c, std::ostream& out) {
    const Json rels = parse_json_argument(relations_text);
    if (!rels.is_array()) throw UsageError("--relations must be a JSON array");
    std::vector<std::pair<RationalMatrix, Rational>> relations;
    for (const auto& r : rels) {
        if (!r.is_object() || !r.contains("m") || !r.contains("lambda"))
            throw UsageError("each relation needs \"m\" and \"lambda\"");
        relations.emplace_back(json_matrix(r["m"]), json_number(r["lambda"]));
    }
    const auto shape = bilinear_hierarchy_shape(relations, matrix_arg(ms_text), parse_number(ls_text));
    auto chain = [](const std::vector<std::size_t>& v) {
        Json a = Json::array();
        for (auto i : v) a.push_back(i + 1);
        return a;
    };
    if (c.json) {
        out << Json{{"positive", chain(shape.positive)}, {"nonpositive", chain(shape.nonpositive)}}.dump(2) << "\n";
    } else {
        auto print = [&](const char* name, const std::vector<std::size_t>& v) {
            out << name << ":";
            for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " -> R" : " R") << v[i] + 1;
            out << "\n";
        };
        print("positive thresholds", shape.positive);
        print("nonpositive thresholds", shape.nonpositive);
    }
    return kSuccess;
}

int cmd_simple(const std::map<std::string, std::string>& vectors, const std::string& thresholds_text,
               const Common& c, std::ostream& out) {
    SimplECompositionParameters p;
    p.r = vector_arg(vectors.at("r"));
    p.ri = vector_arg(vectors.at("ri"));
    p.s = vector_arg(vectors.at("s"));
    p.si = vector_arg(vectors.at("si"));
    p.t = vector_arg(vectors.at("t"));
    p.ti = vector_arg(vectors.at("ti"));
    const auto th = vector_arg(thresholds_text);
    if (th.size() != 6) throw UsageError("--thresholds needs six values");
    p.lambda_r = th[0], p.lambda_ri = th[1], p.lambda_s = th[2], p.lambda_si = th[3], p.lambda_t = th[4],
    p.lambda_ti = th[5];
    const auto res = simple_composition_counterexample(p);
    const Format f = c.fmt();
    if (c.json) {
        Json doc{{"verdict", to_string(res.kind)}};
        if (res.witness) {
            const auto& w = *res.witness;
            const auto v = composition_values(p, w);
            doc["k"] = f.num_json(w.k);
            for (const auto& [name, ent] : {std::pair{"e", &w.e}, std::pair{"f", &w.f}, std::pair{"g", &w.g}})
                doc[name] = Json{{"head", f.vec_json(ent->head)}, {"tail", f.vec_json(ent->tail)}};
            doc["values"] = f.vec_json({v.r, v.ri, v.s, v.si, v.t, v.ti});
        }
        out << doc.dump(2) << "\n";
    } else {
        out << to_string(res.kind) << "\n";
        if (res.witness) {
            const auto& w = *res.witness;
            const auto v = composition_values(p, w);
            out << "K = " << f.num(w.k) << "\n";
            for (const auto& [name, ent] : {std::pair{"e", &w.e}, std::pair{"f", &w.f}, std::pair{"g", &w.g}})
                out << name << "_h = " << f.vec(ent->head) << ", " << name << "_t = " << f.vec(ent->tail) << "\n";
            out << "body: " << f.num(v.r) << " >= " << f.num(p.lambda_r) << ", " << f.num(v.ri)
                << " >= " << f.num(p.lambda_ri) << ", " << f.num(v.s) << " >= " << f.num(p.lambda_s) << ", "
                << f.num(v.si) << " >= " << f.num(p.lambda_si) << "\n";
            out << "head: " << f.num(v.t) << " vs " << f.num(p.lambda_t) << ", " << f.num(v.ti) << " vs "
                << f.num(p.lambda_ti) << "\n";
        }
    }
    return res.witness ? kViolation : kSuccess;
}

Polytope polytope_arg(const std::string& text) {
    const auto pts = matrix_arg(text);
    if (pts.empty()) throw UsageError("point list must not be empty; use a nonempty list of points");
    return Polytope(pts[0].size(), pts);
}

int cmd_marriage(const std::string& ch, const std::string& cw, const std::string& cm, std::size_t search,
                 std::uint64_t seed, const Common& c, std::ostream& out) {
    const Format f = c.fmt();
    std::vector<BetweennessStep> steps;
    try {
        steps = translation_subsumption_demo(polytope_arg(ch), polytope_arg(cw), polytope_arg(cm));
    } catch (const PremiseViolated& e) {
        if (c.json)
            out << Json{{"premises", false}, {"detail", e.what()}, {"witness", f.vec_json(e.witness)}}.dump(2) << "\n";
        else
            out << "premise violated: " << e.what() << "\n";
        return kViolation;
    }
    const auto report = search_interval_triples(search, seed);
    const bool all_in = std::all_of(steps.begin(), steps.end(), [](const BetweennessStep& s) { return s.q_in_husband; });
    if (c.json) {
        Json st = Json::array();
        for (const auto& s : steps)
            st.push_back(Json{{"q", f.vec_json(s.q)},
                              {"p", f.vec_json(s.p)},
                              {"r", f.vec_json(s.r)},
                              {"q_plus_r", f.vec_json(s.shifted)},
                              {"q_in_husband", s.q_in_husband}});
        out << Json{{"premises", true},
                    {"steps", st},
                    {"seed", seed},
                    {"search",
                     {{"tried", report.tried},
                      {"accepted", report.accepted},
                      {"wife_not_contained", report.wife_not_contained},
                      {"disjoint", report.disjoint}}}}
                   .dump(2)
            << "\n";
    } else {
        for (const auto& s : steps)
            out << "q = " << f.vec(s.q) << " = p + r with p = " << f.vec(s.p) << " in C_H, r = " << f.vec(s.r)
                << " in C_M; q + r = " << f.vec(s.shifted) << " in C_H; q between p and q + r, so q in C_H: "
                << (s.q_in_husband ? "yes" : "no") << "\n";
        out << "interval search (seed " << seed << "): " << report.accepted << " triples meeting both inclusions out of "
            << report.tried << ", " << report.wife_not_contained << " with C_W outside C_H, " << report.disjoint
            << " with C_H and C_W disjoint\n";
    }
    return all_in && report.wife_not_contained == 0 ? kSuccess : kViolation;
}

std::set<Triple> read_triples(const std::string& path) {
    std::istringstream in(read_file(path));
    std::set<Triple> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> words;
        for (std::string w; ls >> w;) words.push_back(w);
        if (words.empty()) continue;
        if (words.size() != 3) throw UsageError(path + ":" + std::to_string(lineno) + ": expected head relation tail");
        out.insert(Triple{words[0], words[1], words[2]});
    }
    return out;
}

int cmd_graph(const std::string& path, const std::string& subset_text, const Common& c, std::ostream& out) {
    const auto graph = read_triples(path);
    std::set<std::string> subset;
    std::stringstream ss(subset_text);
    for (std::string s; std::getline(ss, s, ',');)
        if (!s.empty()) subset.insert(s);
    const auto v = translation_graph_properties(graph, subset);
    if (c.json) {
        Json a = Json::array();
        for (const auto& x : v)
            a.push_back(Json{{"relation", x.relation}, {"property", to_string(x.property)}, {"entities", x.entities}});
        out << Json{{"violations", a}}.dump(2) << "\n";
    } else {
        for (const auto& x : v) {
            out << x.relation << ": " << to_string(x.property);
            for (const auto& e : x.entities) out << " " << e;
            out << "\n";
        }
        if (v.empty()) out << "no violations\n";
    }
    return v.empty() ? kSuccess : kViolation;
}

struct ScoreArgs {
    std::string model, e, f, r, ri, m, mh, mt, lambda = "0", distance = "l1";
};

int cmd_score(const ScoreArgs& a, const Common& c, std::ostream& out) {
    const Format fm = c.fmt();
    auto need = [](const std::string& v, const char* flag) -> const std::string& {
        if (v.empty()) throw UsageError(std::string("missing ") + flag);
        return v;
    };
    const Rational lambda = parse_number(a.lambda);
    const auto e = vector_arg(need(a.e, "--e")), f = vector_arg(need(a.f, "--f"));
    Rational s;
    bool inside = false;
    if (a.model == "simple") {
        if (e.size() % 2 || f.size() % 2) throw UsageError("SimplE entities are head and tail halves of one vector");
        auto split = [](const RationalVector& v) {
            const auto h = static_cast<std::ptrdiff_t>(v.size() / 2);
            return SimplEEntity{RationalVector(v.begin(), v.begin() + h), RationalVector(v.begin() + h, v.end())};
        };
        const SimplERelation rel{vector_arg(need(a.r, "--r")), vector_arg(need(a.ri, "--ri")), lambda, lambda};
        s = score(rel, split(e), split(f));
        inside = in_region(rel, split(e), split(f));
    } else {
        Relation rel;
        if (a.model == "transe" || a.model == "stranse") {
            TranslationRelation t{vector_arg(need(a.r, "--r")), lambda, {}, {}, Distance::L1};
            if (a.distance == "l2sq")
                t.distance = Distance::SquaredL2;
            else if (a.distance != "l1")
                throw UsageError("--distance must be l1 or l2sq");
            if (a.model == "stranse") {
                t.head_map = matrix_arg(need(a.mh, "--mh"));
                t.tail_map = matrix_arg(need(a.mt, "--mt"));
            }
            rel = t;
        } else if (a.model == "distmult") {
            rel = distmult(vector_arg(need(a.r, "--r")), lambda);
        } else if (a.model == "rescal") {
            rel = BilinearRelation{matrix_arg(need(a.m, "--m")), lambda};
        } else if (a.model == "complex") {
            rel = complex_relation(vector_arg(need(a.r, "--r")), vector_arg(need(a.ri, "--ri")), lambda);
        } else {
            throw UsageError("unknown model " + a.model);
        }
        s = score(rel, e, f);
        inside = in_region(rel, e, f);
    }
    if (c.json)
        out << Json{{"model", a.model}, {"score", fm.num_json(s)}, {"in_region", inside}}.dump(2) << "\n";
    else
        out << "score: " << fm.num(s) << "\nin region: " << (inside ? "yes" : "no") << "\n";
    return kSuccess;
}

void add_common(CLI::App* sub, Common& c, bool with_output) {
    sub->add_flag("--json", c.json, "Machine-readable output");
    sub->add_flag("--float", c.use_float, "Print numbers as decimals");
    if (with_output) sub->add_option("-o,--output", c.output, "Output file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Region-based models of existential-rule knowledge bases", "geomodel"};
    app.require_subcommand(1);

    Common common;
    std::string file, geometry;
    std::size_t max_steps = kDefaultMaxSteps;
    bool compact = false;
    ProbeOptions probe;
    std::string sampler = "mixed";
    std::size_t helly_n = 3, helly_dim = 1;
    std::uint64_t seed = 0;

    auto* parse = app.add_subcommand("parse", "Parse a program and print its canonical form");
    parse->add_option("program", file, "Rule file")->required();
    add_common(parse, common, true);

    auto* qc = app.add_subcommand("qc-check", "Report quasi-chainedness of every rule and constraint");
    qc->add_option("program", file)->required();
    add_common(qc, common, false);

    auto* ch = app.add_subcommand("chase", "Materialise a model with the restricted chase");
    ch->add_option("program", file)->required();
    ch->add_option("--max-steps", max_steps, "Rule application budget");
    add_common(ch, common, true);

    auto* embed = app.add_subcommand("embed", "Chase and build the unit-vector convex model");
    embed->add_option("program", file)->required();
    embed->add_option("--max-steps", max_steps);
    embed->add_flag("--compact", compact, "Drop one dimension via the hyperplane chart");
    add_common(embed, common, true);

    auto* verify = app.add_subcommand("verify", "Compare the atoms satisfied by a geometry with the chase model");
    verify->add_option("geometry", geometry)->required();
    verify->add_option("program", file)->required();
    verify->add_option("--max-steps", max_steps);
    add_common(verify, common, false);

    auto* check = app.add_subcommand("check-rules", "Exact geometric check of every rule and constraint");
    check->add_option("geometry", geometry)->required();
    check->add_option("program", file)->required();
    add_common(check, common, false);

    auto* pr = app.add_subcommand("probe", "Randomised extension probing");
    pr->add_option("geometry", geometry)->required();
    pr->add_option("program", file)->required();
    pr->add_option("--trials", probe.trials);
    pr->add_option("--points", probe.points);
    pr->add_option("--seed", probe.seed);
    pr->add_option("--max-steps", probe.max_steps);
    pr->add_option("--sampler", sampler)->check(CLI::IsMember({"mixed", "midpoint"}));
    add_common(pr, common, true);

    auto* helly = app.add_subcommand("helly", "Common-point construction for the pairwise-exclusion instance");
    helly->add_option("--n", helly_n, "Number of constants and relations")->check(CLI::Range(2, 64));
    helly->add_option("--dim", helly_dim, "Embedding dimension");
    helly->add_option("--seed", seed);
    add_common(helly, common, true);

    auto* limits = app.add_subcommand("limits", "Constructions showing what embedding families cannot capture");
    limits->require_subcommand(1);

    std::string mr, lr, ms, ls;
    std::size_t samples = 100000;
    auto* bil = limits->add_subcommand("bilinear", "Decide R(X,Y) -> S(X,Y) for bilinear relations");
    bil->add_option("--mr", mr, "Matrix of R as JSON")->required();
    bil->add_option("--lr", lr, "Lower bound for R")->required();
    bil->add_option("--ms", ms, "Matrix of S as JSON")->required();
    bil->add_option("--ls", ls, "Lower bound for S")->required();
    bil->add_option("--samples", samples, "Falsification samples for satisfied verdicts");
    bil->add_option("--seed", seed);
    add_common(bil, common, false);

    std::string relations;
    auto* hier = limits->add_subcommand("hierarchy", "Order relations subsumed by one bilinear relation");
    hier->add_option("--relations", relations, "JSON list of {\"m\", \"lambda\"}")->required();
    hier->add_option("--ms", ms)->required();
    hier->add_option("--ls", ls)->required();
    add_common(hier, common, false);

    std::map<std::string, std::string> vectors;
    std::string thresholds = "[1,1,1,1,1,1]";
    auto* simple = limits->add_subcommand("simple", "SimplE composition R(X,Y), S(Y,Z) -> T(X,Z)");
    for (const char* name : {"r", "ri", "s", "si", "t", "ti"})
        simple->add_option(std::string("--") + name, vectors[name], "Relation vector as JSON")->required();
    simple->add_option("--thresholds", thresholds, "Lower bounds for r, ri, s, si, t, ti");
    add_common(simple, common, false);

    std::string chs = "[[0],[2]]", cws = "[[1]]", cms = "[[1]]";
    std::size_t search = 100;
    auto* ex2 = limits->add_subcommand("marriage", "Translation regions for the marriage rules");
    ex2->add_option("--ch", chs, "Husband region points as JSON");
    ex2->add_option("--cw", cws, "Wife region points as JSON");
    ex2->add_option("--cm", cms, "Married translation points as JSON");
    ex2->add_option("--search", search, "Random interval triples to test");
    ex2->add_option("--seed", seed);
    add_common(ex2, common, false);

    std::string triples, subset;
    auto* graph = limits->add_subcommand("graph-props", "Graph conditions necessary for translation models");
    graph->add_option("triples", triples, "File with one 'head relation tail' triple per line")->required();
    graph->add_option("--subset", subset, "Comma-separated entity subset")->required();
    add_common(graph, common, false);

    ScoreArgs sa;
    auto* sc = limits->add_subcommand("score", "Score one pair under an embedding family");
    sc->add_option("--model", sa.model)
        ->required()
        ->check(CLI::IsMember({"transe", "stranse", "distmult", "rescal", "complex", "simple"}));
    sc->add_option("--e", sa.e);
    sc->add_option("--f", sa.f);
    sc->add_option("--r", sa.r);
    sc->add_option("--ri", sa.ri);
    sc->add_option("--m", sa.m);
    sc->add_option("--mh", sa.mh);
    sc->add_option("--mt", sa.mt);
    sc->add_option("--lambda", sa.lambda);
    sc->add_option("--distance", sa.distance);
    add_common(sc, common, false);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }

    probe.sampler = sampler == "midpoint" ? Sampler::Midpoint : Sampler::Mixed;
    try {
        if (parse->parsed()) return cmd_parse(file, common, out);
        if (qc->parsed()) return cmd_qc(file, common, out);
        if (ch->parsed()) return cmd_chase(file, max_steps, common, out);
        if (embed->parsed()) return cmd_embed(file, max_steps, compact, common, out, err);
        if (verify->parsed()) return cmd_verify(geometry, file, max_steps, common, out, err);
        if (check->parsed()) return cmd_check_rules(geometry, file, common, out);
        if (pr->parsed()) return cmd_probe(geometry, file, probe, sampler, common, out);
        if (helly->parsed()) return cmd_helly(helly_n, helly_dim, seed, common, out);
        if (bil->parsed()) return cmd_bilinear(mr, lr, ms, ls, samples, seed, common, out);
        if (hier->parsed()) return cmd_hierarchy(relations, ms, ls, common, out);
        if (simple->parsed()) return cmd_simple(vectors, thresholds, common, out);
        if (ex2->parsed()) return cmd_marriage(chs, cws, cms, search, seed, common, out);
        if (graph->parsed()) return cmd_graph(triples, subset, common, out);
        if (sc->parsed()) return cmd_score(sa, common, out);
    } catch (const SyntaxError& e) {
        err << file << ":" << e.line << ":" << e.col << ": " << e.what() << "\n";
        return kUsageError;
    } catch (const NotGuaranteedTerminating& e) {
        err << "refused: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    err << "error: no command\n";
    return kUsageError;
}

}  // namespace geomodel::cli
