// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "geomodel/chase.hpp"
#include "geomodel/embedding_limits.hpp"
#include "geomodel/geometry.hpp"
#include "geomodel/rule_check.hpp"
#include "geomodel/rules.hpp"
#include "oracles.hpp"

using namespace geomodel;

namespace {

// Pinned limits.
constexpr double kExample1Seconds = 1.0;
constexpr double kSuiteSeconds = 120.0;
constexpr std::size_t kSuiteSize = 200;
constexpr std::size_t kProbeTrials = 20;
constexpr std::size_t kProbePoints = 3;
constexpr std::size_t kExample4MaxTrials = 20;
constexpr std::size_t kMatrixPairs = 100;
constexpr std::size_t kFalsificationSamples = 100000;
constexpr std::size_t kSimplESets = 50;
constexpr std::size_t kIntervalTriples = 100;
constexpr std::size_t kDatalogKbs = 100;
constexpr std::size_t kRoundTrips = 50;
constexpr std::size_t kSuiteMaxSteps = 2000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

Atom fact(std::string rel, std::vector<std::string> names) {
    Atom a{std::move(rel), {}};
    for (auto& n : names) a.args.push_back(object_from_name(n));
    return a;
}

Rational form(const RationalMatrix& m, const RationalVector& e, const RationalVector& f) {
    Rational s = 0;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j) s += e[i] * m[i][j] * f[j];
    return s;
}

Rational tri(const RationalVector& a, const RationalVector& b, const RationalVector& c) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * c[i];
    return s;
}

bool in_hull(const Polytope& p, const Point& x) { return oracle::hull_contains(p.vertices(), x); }

bool repeats_within_atom(const std::vector<Atom>& body) {
    for (const auto& a : body)
        for (std::size_t i = 0; i < a.args.size(); ++i)
            for (std::size_t j = i + 1; j < a.args.size(); ++j)
                if (a.args[i].is_variable() && a.args[i] == a.args[j]) return true;
    return false;
}

// The random quasi-chained, weakly acyclic suite shared by criteria 2 and 3.
struct SuiteEntry {
    KnowledgeBase kb;
    Interpretation model;
};

std::vector<SuiteEntry> qc_suite(std::uint64_t seed, std::size_t count, std::size_t& rejected) {
    gen::Shape shape;
    shape.max_relations = 5;
    shape.max_arity = 3;
    shape.max_constants = 8;
    shape.max_rules = 6;
    shape.existential = true;
    shape.quasi_chained = true;
    gen::KbGenerator g(seed, shape);
    std::vector<SuiteEntry> out;
    rejected = 0;
    while (out.size() < count) {
        auto kb = g.next();
        if (!is_weakly_acyclic(kb.ontology) || !check_quasi_chained(kb.ontology).quasi_chained) {
            ++rejected;
            continue;
        }
        auto res = chase(kb, kSuiteMaxSteps);
        if (res.outcome != ChaseResult::Outcome::Model) {
            ++rejected;
            continue;
        }
        out.push_back({std::move(kb), std::move(res.atoms)});
    }
    return out;
}

Outcome criterion1() {
    const auto t0 = Clock::now();
    const auto kb = parse_program(R"(
Wife(X), Married(X,Y) -> Husband(Y).
Wife(Y) -> exists X. Husband(X), Married(X,Y).
Husband(X), Wife(X) -> false.
Wife(anna). Wife(marie).)");
    const Interpretation expected{fact("Wife", {"anna"}),     fact("Wife", {"marie"}),
                                  fact("Husband", {"_n1"}),   fact("Married", {"_n1", "anna"}),
                                  fact("Husband", {"_n2"}),   fact("Married", {"_n2", "marie"})};
    const auto res = chase(kb);
    bool ok = res.outcome == ChaseResult::Outcome::Model && res.atoms.size() == 6 &&
              equal_up_to_null_renaming(res.atoms, expected);
    const auto eta = build_prop3_model(res.atoms, kb.constants(), kb.arities);
    ok = ok && eta.m == 4 && phi(eta) == res.atoms;
    std::size_t satisfied = 0;
    for (const auto& r : kb.ontology.rules) satisfied += check_rule_geometric(eta, r).status == RuleVerdict::Status::Satisfied;
    for (const auto& c : kb.ontology.constraints)
        satisfied += check_rule_geometric(eta, c).status == RuleVerdict::Status::Satisfied;
    const double secs = seconds_since(t0);
    ok = ok && satisfied == 3 && secs < kExample1Seconds;
    std::ostringstream d;
    d << res.atoms.size() << " atoms, m = " << eta.m << ", " << satisfied << "/3 statements satisfied, " << secs
      << " s (limit " << kExample1Seconds << " s)";
    return {ok, d.str()};
}

Outcome criterion2(const std::vector<SuiteEntry>& suite, double build_secs) {
    const auto t0 = Clock::now();
    std::size_t exact = 0, statements = 0, satisfied = 0, failed_with_repeats = 0;
    auto tally = [&](const std::vector<Atom>& body, RuleVerdict::Status status) {
        ++statements;
        if (status == RuleVerdict::Status::Satisfied)
            ++satisfied;
        else
            failed_with_repeats += repeats_within_atom(body);
    };
    for (const auto& [kb, model] : suite) {
        const auto eta = build_prop3_model(model, kb.constants(), kb.arities);
        exact += phi(eta) == model;
        for (const auto& r : kb.ontology.rules) tally(r.body, check_rule_geometric(eta, r).status);
        for (const auto& c : kb.ontology.constraints) tally(c.body, check_rule_geometric(eta, c).status);
    }
    const double secs = build_secs + seconds_since(t0);
    std::ostringstream d;
    d << "phi exact " << exact << "/" << suite.size() << ", " << satisfied << "/" << statements
      << " statements satisfied (" << failed_with_repeats << " of " << statements - satisfied
      << " failures have a variable repeated inside one body atom), " << secs << " s (limit " << kSuiteSeconds << " s)";
    return {exact == suite.size() && satisfied == statements && secs < kSuiteSeconds, d.str()};
}

Outcome criterion3(const std::vector<SuiteEntry>& suite) {
    std::size_t unsat = 0, errors = 0, checks = 0;
    std::uint64_t seed = 1000;
    for (const auto& [kb, model] : suite) {
        const auto eta = build_prop3_model(model, kb.constants(), kb.arities);
        ProbeOptions opt;
        opt.trials = kProbeTrials;
        opt.points = kProbePoints;
        opt.seed = seed++;
        const auto report = probe_extension(eta, kb, opt);
        unsat += report.violations();
        errors += report.errors();
        checks += report.trials.size() * kProbePoints;
    }

    const auto kb4 = parse_program("R1(X,Y), R2(X,Y) -> false. R1(a1,a1). R1(a2,a2). R2(a1,a2). R2(a2,a1).");
    const auto res4 = chase(kb4);
    const auto eta4 = build_prop3_model(res4.atoms, kb4.constants(), kb4.arities);
    const Point a1 = eta4.entities.at(Term::constant("a1")), a2 = eta4.entities.at(Term::constant("a2"));
    Point mid(a1.size());
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = (a1[i] + a2[i]) / 2;
    ProbeOptions opt4;
    opt4.trials = kExample4MaxTrials;
    opt4.points = 1;
    opt4.sampler = Sampler::Midpoint;
    const auto report4 = probe_extension(eta4, kb4, opt4);
    std::size_t found = 0, exact_witness = 0;
    for (const auto& t : report4.trials) {
        if (t.outcome != ProbeTrial::Outcome::Unsatisfiable) continue;
        ++found;
        for (const auto& [name, p] : t.points) exact_witness += p == mid;
    }
    std::ostringstream d;
    d << unsat << " unsatisfiable and " << errors << " errors over " << suite.size() << " KBs x " << kProbeTrials
      << " trials (" << checks << " sampled points); pair constraint: " << found << " violations in "
      << kExample4MaxTrials << " midpoint trials, " << exact_witness << " at (a1 + a2) / 2";
    return {unsat == 0 && errors == 0 && found >= 1 && exact_witness >= 1, d.str()};
}

GeometricInterpretation random_helly_interpretation(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> c(-6, 6);
    auto point = [&] {
        Point p(dim);
        for (auto& x : p) x = Rational(c(rng), 1 + static_cast<int>(rng() % 3));
        return p;
    };
    GeometricInterpretation eta;
    eta.m = dim;
    eta.arities = helly_instance(n).arities;
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

Outcome criterion4() {
    std::mt19937_64 rng(404);
    std::size_t tested = 0, broken = 0, tight = 0;
    for (std::size_t n = 3; n <= 8; ++n) {
        for (std::size_t dim = 1; dim + 2 <= n; ++dim) {
            for (int rep = 0; rep < 3; ++rep) {
                const auto eta = random_helly_interpretation(n, dim, rng);
                ++tested;
                const auto res = helly_break(eta, n);
                if (!res.point || !res.certificate) continue;
                bool inside = true;
                for (std::size_t i = 1; i <= n; ++i) inside &= in_hull(eta.region("A" + std::to_string(i)), *res.point);
                broken += inside && res.helly_guaranteed &&
                          res.certificate->outcome == ChaseResult::Outcome::Unsatisfiable;
            }
        }
        const auto kb = helly_instance(n);
        const auto eta = compact_datalog_model(build_prop3_model(kb.database, {}, kb.arities));
        tight += eta.m == n - 1 && phi(eta) == kb.database &&
                 check_rule_geometric(eta, kb.ontology.constraints[0]).status == RuleVerdict::Status::Satisfied;
    }
    std::ostringstream d;
    d << broken << "/" << tested << " interpretations with dim <= n - 2 broken by an exact common point; " << tight
      << "/6 compacted unit-vector models (dim n - 1) satisfy the constraint";
    return {broken == tested && tight == 6, d.str()};
}

RationalMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    RationalMatrix m(n, RationalVector(n));
    for (auto& row : m)
        for (auto& x : row) x = rng() % 4 == 0 ? Rational(0) : Rational(num(rng), den(rng));
    return m;
}

Outcome criterion5() {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<int> lam(-4, 4);
    std::size_t counterexamples = 0, nonprop = 0;
    while (nonprop < kMatrixPairs) {
        const std::size_t n = 2 + nonprop % 4;
        const auto mr = random_matrix(rng, n), ms = random_matrix(rng, n);
        if (proportionality_factor(mr, ms)) continue;
        const Rational lr(lam(rng)), ls(lam(rng));
        bool ms_zero = true;
        for (const auto& row : ms)
            for (const auto& x : row) ms_zero &= x == 0;
        if (ms_zero && ls <= 0) continue;
        ++nonprop;
        const auto d = bilinear_rule_decision(mr, lr, ms, ls);
        counterexamples += !d.satisfied() && form(mr, d.e, d.f) >= lr && form(ms, d.e, d.f) < ls;
    }
    std::size_t satisfied = 0, clean = 0;
    for (std::size_t k = 0; k < kMatrixPairs; ++k) {
        const std::size_t n = 2 + k % 4;
        auto ms = random_matrix(rng, n);
        ms[0][0] = 1;
        const Rational alpha(1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 8));
        RationalMatrix mr = ms;
        for (auto& row : mr)
            for (auto& x : row) x *= alpha;
        const Rational ls(lam(rng));
        const Rational lr = ls * alpha + Rational(static_cast<int>(rng() % 3));
        const auto d = bilinear_rule_decision(mr, lr, ms, ls);
        satisfied += d.satisfied();
        clean += falsify_bilinear(mr, lr, ms, ls, kFalsificationSamples, 5000 + k).violations == 0;
    }
    std::ostringstream d;
    d << counterexamples << "/" << kMatrixPairs << " non-proportional pairs with verified counterexamples; "
      << satisfied << "/" << kMatrixPairs << " proportional pairs satisfied, " << clean << "/" << kMatrixPairs
      << " with no violation in " << kFalsificationSamples << " samples";
    return {counterexamples == kMatrixPairs && satisfied == kMatrixPairs && clean == kMatrixPairs, d.str()};
}

SimplECompositionParameters random_simple(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> c(-4, 4);
    auto vec = [&] {
        RationalVector v(n);
        bool zero = true;
        while (zero) {
            for (auto& x : v) x = Rational(c(rng), 2);
            zero = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
        }
        return v;
    };
    SimplECompositionParameters p;
    p.r = vec(), p.ri = vec(), p.s = vec(), p.si = vec(), p.t = vec(), p.ti = vec();
    p.lambda_r = c(rng), p.lambda_ri = c(rng), p.lambda_s = c(rng), p.lambda_si = c(rng), p.lambda_t = c(rng),
    p.lambda_ti = c(rng);
    return p;
}

Outcome criterion6() {
    std::mt19937_64 rng(606);
    std::size_t verified = 0;
    for (std::size_t k = 0; k < kSimplESets; ++k) {
        const auto p = random_simple(rng, 2 + k % 3);
        const auto out = simple_composition_counterexample(p);
        if (!out.witness) continue;
        const auto& w = *out.witness;
        const bool body = tri(w.e.head, p.r, w.f.tail) >= p.lambda_r && tri(w.f.head, p.ri, w.e.tail) >= p.lambda_ri &&
                          tri(w.f.head, p.s, w.g.tail) >= p.lambda_s && tri(w.g.head, p.si, w.f.tail) >= p.lambda_si;
        const bool head = tri(w.e.head, p.t, w.g.tail) >= p.lambda_t && tri(w.g.head, p.ti, w.e.tail) >= p.lambda_ti;
        verified += body && !head;
    }
    std::size_t degenerate = 0;
    auto trivial_head = random_simple(rng, 3);
    trivial_head.t.assign(3, Rational(0));
    trivial_head.ti.assign(3, Rational(0));
    trivial_head.lambda_t = 0;
    trivial_head.lambda_ti = -2;
    degenerate += simple_composition_counterexample(trivial_head).kind == SimplECompositionOutcome::Kind::HeadAlwaysTrue;
    for (int which = 0; which < 4; ++which) {
        auto q = random_simple(rng, 2 + static_cast<std::size_t>(which % 3));
        RationalVector* body[] = {&q.r, &q.ri, &q.s, &q.si};
        Rational* lambdas[] = {&q.lambda_r, &q.lambda_ri, &q.lambda_s, &q.lambda_si};
        body[which]->assign(body[which]->size(), Rational(0));
        *lambdas[which] = 1 + which;
        degenerate +=
            simple_composition_counterexample(q).kind == SimplECompositionOutcome::Kind::BodyUnsatisfiable;
    }
    std::ostringstream d;
    d << verified << "/" << kSimplESets << " witnesses with body true and head false; " << degenerate
      << "/5 degenerate cases classified trivial";
    return {verified == kSimplESets && degenerate == 5, d.str()};
}

Outcome criterion7() {
    const Polytope husband(1, {{Rational(0)}, {Rational(2)}});
    const Polytope wife(1, {{Rational(1)}});
    const Polytope married(1, {{Rational(1)}});
    const auto steps = translation_subsumption_demo(husband, wife, married);
    std::size_t placed = 0;
    for (const auto& s : steps) {
        Point mid(s.q.size());
        for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = (s.p[i] + s.shifted[i]) / 2;
        placed += s.q_in_husband && mid == s.q && in_hull(husband, s.p) && in_hull(husband, s.shifted) &&
                  in_hull(married, s.r) && in_hull(husband, s.q);
    }
    const auto report = search_interval_triples(kIntervalTriples, 707);
    std::ostringstream d;
    d << placed << "/" << steps.size() << " wife vertices placed in C_H by betweenness; " << report.accepted
      << " interval triples accepted of " << report.tried << " tried, " << report.wife_not_contained
      << " with C_W outside C_H";
    return {placed == steps.size() && !steps.empty() && report.accepted == kIntervalTriples &&
                report.wife_not_contained == 0,
            d.str()};
}

// An unsatisfiable run stops at the first violated constraint, so the
// partial instances are not comparable; the constraint-free closures are.
Outcome criterion8() {
    gen::Shape shape;
    gen::KbGenerator g(808, shape);
    std::size_t equal = 0, models = 0;
    for (std::size_t k = 0; k < kDatalogKbs; ++k) {
        const auto kb = g.next();
        auto closure = kb;
        closure.ontology.constraints.clear();
        const auto a = chase(kb), b = datalog_fixpoint(kb);
        const auto ca = chase(closure), cb = datalog_fixpoint(closure);
        models += a.outcome == ChaseResult::Outcome::Model;
        equal += a.outcome == b.outcome && (a.outcome != ChaseResult::Outcome::Model || a.atoms == b.atoms) &&
                 ca.outcome == ChaseResult::Outcome::Model && cb.outcome == ChaseResult::Outcome::Model &&
                 ca.atoms == cb.atoms;
    }
    std::ostringstream d;
    d << equal << "/" << kDatalogKbs << " identical outcomes and atom sets (" << models
      << " models; unsatisfiable ones compared on their constraint-free closure)";
    return {equal == kDatalogKbs, d.str()};
}

Outcome criterion9(const std::vector<SuiteEntry>& suite) {
    std::size_t model = 0, geometry = 0, probe = 0, program = 0;
    for (std::size_t k = 0; k < kRoundTrips; ++k) {
        const auto& [kb, m] = suite[k];
        const auto mt = dump_model_json(m);
        model += dump_model_json(load_model_json(mt)) == mt;
        const auto eta = build_prop3_model(m, kb.constants(), kb.arities);
        const auto gt = dump_geometry_json(eta);
        geometry += dump_geometry_json(load_geometry_json(gt)) == gt;
        ProbeOptions opt;
        opt.trials = 2;
        opt.points = 2;
        opt.seed = 900 + k;
        const auto pt = dump_probe_json(probe_extension(eta, kb, opt));
        probe += dump_probe_json(load_probe_json(pt)) == pt;
        const auto dt = render(kb);
        program += render(parse_program(dt)) == dt;
    }
    std::ostringstream d;
    d << "byte-identical reloads: model " << model << ", geometry " << geometry << ", probe " << probe
      << ", program " << program << " (of " << kRoundTrips << " each)";
    return {model == kRoundTrips && geometry == kRoundTrips && probe == kRoundTrips && program == kRoundTrips,
            d.str()};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    };

    report(1, criterion1);
    std::vector<SuiteEntry> suite;
    double build_secs = 0;
    std::size_t rejected = 0;
    {
        const auto t0 = Clock::now();
        suite = qc_suite(202, kSuiteSize, rejected);
        build_secs = seconds_since(t0);
    }
    report(2, [&] { return criterion2(suite, build_secs); });
    report(3, [&] { return criterion3(suite); });
    report(4, criterion4);
    report(5, criterion5);
    report(6, criterion6);
    report(7, criterion7);
    report(8, criterion8);
    report(9, [&] { return criterion9(suite); });
    return failures == 0 ? 0 : 1;
}
