#include "doctest.h"

#include <random>

#include "geomodel/geometry.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace geomodel;

namespace {

Atom fact(std::string rel, std::vector<std::string> args) {
    Atom a{std::move(rel), {}};
    for (auto& s : args) a.args.push_back(object_from_name(s));
    return a;
}

Point unit(std::size_t m, std::size_t i) {
    Point p(m, Rational(0));
    p[i] = 1;
    return p;
}

const Rational half(1, 2);

Interpretation example1_model() {
    return {fact("Wife", {"anna"}),   fact("Wife", {"marie"}),        fact("Husband", {"_n1"}),
            fact("Husband", {"_n2"}), fact("Married", {"_n1", "anna"}), fact("Married", {"_n2", "marie"})};
}

Interpretation example4_database() {
    return {fact("R1", {"a1", "a1"}), fact("R1", {"a2", "a2"}), fact("R2", {"a1", "a2"}), fact("R2", {"a2", "a1"})};
}

}  // namespace

TEST_CASE("concatenation") {
    CHECK(concat({{1, 0}, {0, 1}}) == Point{1, 0, 0, 1});
    CHECK(concat({{1, 2}, {}}) == Point{1, 2});
    // e1 ⊕ e3 in m = 4: ones at 0-based positions 0 and 4 + 2.
    auto x = concat({unit(4, 0), unit(4, 2)});
    CHECK(x.size() == 8);
    CHECK(x == Point{1, 0, 0, 0, 0, 0, 1, 0});
}

TEST_CASE("containment examples") {
    CHECK(Polytope(1, {{0}, {1}}).contains({half}));
    CHECK_FALSE(Polytope(4, {unit(4, 0), unit(4, 1)}).contains(unit(4, 2)));
    Point b{half, half};
    Polytope r1(4, {concat({unit(2, 0), unit(2, 0)}), concat({unit(2, 1), unit(2, 1)})});
    CHECK(r1.contains(concat({b, b})));
    CHECK_THROWS_AS(r1.contains(b), DimensionMismatch);
    CHECK_FALSE(Polytope(2).contains({0, 0}));
}

TEST_CASE("containment agrees with the Caratheodory oracle") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> c(-4, 4);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t dim = 1 + static_cast<std::size_t>(trial % 6);
        const std::size_t n = 1 + rng() % 8;
        std::vector<Point> pts(n, Point(dim));
        for (auto& p : pts)
            for (auto& x : p) x = c(rng);
        Polytope poly(dim, pts);
        for (int q = 0; q < 6; ++q) {
            Point x(dim);
            if (q % 2 == 0) {
                // Random convex combination of two generators, slightly perturbed half the time.
                const auto& u = pts[rng() % n];
                const auto& v = pts[rng() % n];
                Rational t(static_cast<int>(rng() % 5), 4);
                for (std::size_t i = 0; i < dim; ++i) x[i] = t * u[i] + (1 - t) * v[i];
                if (q == 2) x[rng() % dim] += Rational(1, 3);
            } else {
                for (auto& v : x) v = Rational(c(rng), 2);
            }
            REQUIRE(poly.contains(x) == oracle::hull_contains(pts, x));
        }
    }
}

TEST_CASE("cached facets agree with vertex membership") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> c(-3, 3);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t dim = 1 + static_cast<std::size_t>(trial % 5);
        std::vector<Point> pts(1 + rng() % 7, Point(dim));
        for (auto& p : pts)
            for (auto& x : p) x = c(rng);
        Polytope lp_only(dim, pts);
        Polytope with_facets(dim, pts);
        with_facets.facets();
        CHECK(with_facets.facets_cached());
        for (int q = 0; q < 15; ++q) {
            Point x(dim);
            for (auto& v : x) v = Rational(c(rng), 2);
            CHECK(lp_only.contains(x) == with_facets.contains(x));
            CHECK(lp_only.contains(x) == with_facets.contains_by_facets(x));
        }
    }
    std::vector<Point> many;
    for (int i = 0; i < 11; ++i) many.push_back(unit(11, static_cast<std::size_t>(i)));
    CHECK_THROWS_AS(Polytope(11, many).facets(), FacetCapExceeded);
}

TEST_CASE("the one-dimensional marriage interpretation") {
    GeometricInterpretation eta;
    eta.m = 1;
    eta.entities = {{Term::constant("p"), {0}}, {Term::constant("q"), {1}}};
    eta.arities = {{"Husband", 1}, {"Wife", 1}, {"Married", 2}};
    eta.regions.emplace("Husband", Polytope(1, {{-1}, {half}}));
    eta.regions.emplace("Wife", Polytope(1, {{-half}, {half}}));
    eta.regions.emplace("Married", Polytope(2, {{0, 1}, {1, 0}}));
    Interpretation expected{fact("Husband", {"p"}), fact("Wife", {"p"}), fact("Married", {"p", "q"}),
                            fact("Married", {"q", "p"})};
    CHECK(phi(eta) == expected);
    CHECK(phi_serial(eta, eta.objects()) == expected);
    CHECK(satisfies_atom(eta, fact("Married", {"p", "q"})));
    CHECK_THROWS_AS(satisfies_atom(eta, fact("Wife", {"z"})), UnknownObject);
}

TEST_CASE("unit-vector model of the marriage example") {
    auto eta = build_prop3_model(example1_model());
    CHECK(eta.m == 4);
    const auto anna = eta.entities.at(Term::constant("anna"));
    CHECK(anna == unit(4, 0));
    CHECK(eta.entities.at(Term::null("_n2")) == unit(4, 3));
    CHECK(eta.region("Wife") == Polytope(4, {unit(4, 0), unit(4, 1)}));
    CHECK(eta.region("Married") ==
          Polytope(8, {concat({unit(4, 2), unit(4, 0)}), concat({unit(4, 3), unit(4, 1)})}));
    CHECK(phi(eta) == example1_model());
    CHECK_FALSE(satisfies_atom(eta, fact("Husband", {"anna"})));
    CHECK(phi(eta, {Term::constant("anna")}) == Interpretation{fact("Wife", {"anna"})});
    CHECK(phi(eta, {}).empty());

    auto empty = build_prop3_model({});
    CHECK(empty.m == 0);
    CHECK(phi(empty).empty());

    auto single = build_prop3_model({fact("R", {"a", "a"})});
    CHECK(single.region("R").vertices() == std::vector<Point>{{1, 1}});
    CHECK(phi(single) == Interpretation{fact("R", {"a", "a"})});

    auto empty_region = build_prop3_model({fact("R", {"a"})}, {}, {{"S", 2}});
    CHECK(phi(empty_region) == Interpretation{fact("R", {"a"})});
}

TEST_CASE("extension with fresh points") {
    auto eta = build_prop3_model(example4_database());
    Point b{half, half};
    auto ext = extend_with_points(eta, {{Term::constant("b"), b}});
    auto atoms = phi(ext);
    CHECK(atoms.count(fact("R1", {"b", "b"})));
    CHECK(atoms.count(fact("R2", {"b", "b"})));
    CHECK_THROWS_AS(extend_with_points(eta, {{Term::constant("a1"), b}}), NameCollision);
    CHECK_THROWS_AS(extend_with_points(eta, {{Term::constant("z"), Point{1}}}), DimensionMismatch);

    auto twin = extend_with_points(eta, {{Term::constant("c"), eta.entities.at(Term::constant("a1"))}});
    auto twin_atoms = phi(twin);
    for (const auto& a : twin_atoms) {
        Atom renamed = a;
        for (auto& t : renamed.args)
            if (t.name == "c") t = Term::constant("a1");
        CHECK(twin_atoms.count(renamed));
    }
    CHECK(twin_atoms.count(fact("R1", {"c", "a1"})));

    auto m1 = build_prop3_model(example1_model());
    auto with_c = extend_with_points(m1, {{Term::constant("c"), {half, half, 0, 0}}});
    CHECK(phi(with_c).count(fact("Wife", {"c"})));
}

TEST_CASE("null witnesses for the marriage example") {
    auto kb = parse_program(R"(
Wife(X), Married(X,Y) -> Husband(Y).
Wife(Y) -> exists X. Husband(X), Married(X,Y).
Husband(X), Wife(X) -> false.
Wife(anna). Wife(marie).)");
    auto base = example1_model();
    auto eta = build_prop3_model(base);
    auto ext = extend_with_points(eta, {{Term::constant("c"), {half, half, 0, 0}}});
    auto syn = synthesize_null_witnesses(ext, base, kb);
    REQUIRE(syn.created.size() == 1);
    const Term x = syn.created[0].first;
    CHECK(x == Term::null("_n3"));
    CHECK(syn.eta.entities.at(x) == Point{0, 0, half, half});
    CHECK(syn.created[0].second == RationalVector{half, half});
    auto atoms = phi(syn.eta);
    CHECK(atoms.count(Atom{"Married", {x, Term::constant("c")}}));
    CHECK(is_model(atoms, KnowledgeBase{kb.ontology, {}, {}}));

    auto same = synthesize_null_witnesses(eta, base, kb);
    CHECK(same.created.empty());
    CHECK(same.eta.entities == eta.entities);

    auto outside = extend_with_points(eta, {{Term::constant("d"), {-1, 3, 0, 0}}});
    CHECK(synthesize_null_witnesses(outside, base, kb).created.empty());
}

TEST_CASE("compaction onto the unit-sum hyperplane") {
    auto eta = build_prop3_model({fact("A", {"a"})}, {Term::constant("b")});
    CHECK(eta.m == 2);
    auto c = compact_datalog_model(eta);
    CHECK(c.m == 1);
    CHECK(c.entities.at(Term::constant("a")) == Point{1});
    CHECK(c.entities.at(Term::constant("b")) == Point{0});
    CHECK(phi(c) == phi(eta));

    auto one = build_prop3_model({fact("A", {"a"})});
    auto zero = compact_datalog_model(one);
    CHECK(zero.m == 0);
    CHECK(phi(zero) == phi(one));

    Interpretation datalog_part{fact("Wife", {"anna"}),       fact("Wife", {"marie"}),
                                fact("Husband", {"h1"}),      fact("Husband", {"h2"}),
                                fact("Married", {"h1", "anna"}), fact("Married", {"h2", "marie"})};
    auto e1 = build_prop3_model(datalog_part);
    auto c1 = compact_datalog_model(e1);
    CHECK(c1.m == 3);
    CHECK(phi(c1) == datalog_part);

    GeometricInterpretation off = eta;
    off.entities[Term::constant("b")] = {1, 1};
    CHECK_THROWS_AS(compact_datalog_model(off), NotProp3Base);
}

TEST_CASE("lookup-table model") {
    auto ext = build_extended_trivial(example4_database());
    CHECK(ext.phi() == example4_database());
    CHECK(build_extended_trivial({}).phi().empty());
    ext.entities.emplace(Term::constant("fresh"), Rational(17));
    auto atoms = ext.phi();
    for (const auto& a : atoms)
        for (const auto& t : a.args) CHECK(t.name != "fresh");
    CHECK(ext.transform("R1", {0, 0}) == 1);
    CHECK(ext.transform("R1", {0, 1}) == 0);
}

namespace {

std::vector<Interpretation> random_models(std::uint64_t seed, int count) {
    gen::Shape shape;
    shape.existential = true;
    shape.quasi_chained = true;
    shape.max_facts = 8;
    gen::KbGenerator g(seed, shape);
    std::vector<Interpretation> out;
    while (static_cast<int>(out.size()) < count) {
        auto kb = g.next();
        if (!is_weakly_acyclic(kb.ontology)) continue;
        auto res = chase(kb, 200);
        if (res.outcome == ChaseResult::Outcome::Model && res.atoms.size() <= 30) out.push_back(res.atoms);
    }
    return out;
}

}  // namespace

TEST_CASE("phi recovers the model and separates every tuple") {
    for (const auto& m : random_models(31, 40)) {
        auto eta = build_prop3_model(m);
        REQUIRE(phi(eta) == m);
        CHECK(phi_serial(eta, eta.objects()) == m);
    }
}

TEST_CASE("unit-vector separation checked with the independent hull oracle") {
    for (const auto& m : random_models(41, 15)) {
        auto eta = build_prop3_model(m);
        const auto objs = eta.objects();
        for (const auto& [rel, k] : eta.arities) {
            const Polytope region = eta.region(rel);
            const auto& verts = region.vertices();
            if (verts.size() > 10 || k > 2) continue;
            std::vector<std::size_t> idx(k, 0);
            while (true) {
                Atom a{rel, {}};
                std::vector<Point> pts;
                for (auto i : idx) {
                    a.args.push_back(objs[i]);
                    pts.push_back(eta.entities.at(objs[i]));
                }
                CHECK(oracle::hull_contains(verts, concat(pts)) == (m.count(a) > 0));
                std::size_t j = 0;
                while (j < k && ++idx[j] == objs.size()) idx[j++] = 0;
                if (j == k) break;
            }
        }
    }
}

TEST_CASE("extension never changes atoms over the original objects") {
    std::mt19937 rng(4);
    for (const auto& m : random_models(51, 20)) {
        auto eta = build_prop3_model(m);
        EntityMap fresh;
        for (int i = 0; i < 3; ++i) {
            Point p(eta.m);
            for (auto& x : p) x = Rational(static_cast<int>(rng() % 5), 4);
            fresh.emplace(Term::constant("zz" + std::to_string(i)), p);
        }
        auto ext = extend_with_points(eta, fresh);
        CHECK(phi(ext, eta.objects()) == m);
        CHECK(phi(ext) == phi_serial(ext, ext.objects()));
    }
}

TEST_CASE("compaction preserves phi on random datalog models") {
    gen::Shape shape;
    shape.max_facts = 8;
    gen::KbGenerator g(61, shape);
    int done = 0;
    while (done < 30) {
        auto kb = g.next();
        auto res = datalog_fixpoint(kb);
        if (res.outcome != ChaseResult::Outcome::Model || res.atoms.size() > 30) continue;
        auto eta = build_prop3_model(res.atoms);
        CHECK(phi(compact_datalog_model(eta)) == res.atoms);
        ++done;
    }
}

TEST_CASE("geometry dump round trip") {
    auto eta = build_prop3_model(example1_model());
    eta = extend_with_points(eta, {{Term::constant("c"), {half, Rational(-1, 3), 0, 0}}});
    auto text = dump_geometry_json(eta);
    auto back = load_geometry_json(text);
    CHECK(dump_geometry_json(back) == text);
    CHECK(back.entities == eta.entities);
    CHECK(back.regions == eta.regions);
    CHECK(text.find("\"-1/3\"") != std::string::npos);
    CHECK_THROWS_AS(load_geometry_json(R"({"m":1,"entities":{"a":["1/0"]},"relations":{}})"), FormatError);
    CHECK_THROWS_AS(load_geometry_json(R"({"m":2,"entities":{"a":["1"]},"relations":{}})"), FormatError);
}
