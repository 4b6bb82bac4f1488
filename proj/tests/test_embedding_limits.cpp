#include "doctest.h"

#include <complex>
#include <random>

#include "geomodel/embedding_limits.hpp"

using namespace geomodel;

namespace {

using Kind = BilinearDecision::Kind;
using Reason = BilinearDecision::Reason;

RationalMatrix identity(std::size_t n, Rational scale = 1) {
    RationalMatrix m(n, RationalVector(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = scale;
    return m;
}

RationalMatrix scale(RationalMatrix m, const Rational& a) {
    for (auto& row : m)
        for (auto& x : row) x *= a;
    return m;
}

// Independent evaluation of e^T M f, summed column by column.
Rational form_oracle(const RationalMatrix& m, const RationalVector& e, const RationalVector& f) {
    Rational s = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        Rational col = 0;
        for (std::size_t i = 0; i < e.size(); ++i) col += e[i] * m[i][j];
        s += col * f[j];
    }
    return s;
}

RationalMatrix random_matrix(std::mt19937& rng, std::size_t n, double zero_rate) {
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    std::bernoulli_distribution zero(zero_rate);
    RationalMatrix m(n, RationalVector(n));
    for (auto& row : m)
        for (auto& x : row) x = zero(rng) ? Rational(0) : Rational(num(rng), den(rng));
    return m;
}

void check_counterexample(const RationalMatrix& mr, const Rational& lr, const RationalMatrix& ms, const Rational& ls,
                          const BilinearDecision& d) {
    REQUIRE(d.kind == Kind::Counterexample);
    CHECK(form_oracle(mr, d.e, d.f) >= lr);
    CHECK(form_oracle(ms, d.e, d.f) < ls);
}

}  // namespace

TEST_CASE("scoring examples") {
    TranslationRelation transe{{1}, 0, {}, {}, Distance::L1};
    CHECK(score(transe, {0}, {1}) == 0);
    CHECK(in_region(transe, {0}, {1}));
    CHECK(score(distmult({1, 1}, 0), {1, 2}, {1, 1}) == -3);
    CHECK(score(BilinearRelation{identity(2), 0}, {1, 0}, {1, 0}) == -1);
    BilinearRelation zero{RationalMatrix(2, RationalVector(2, Rational(0))), -1};
    CHECK_FALSE(in_region(zero, {1, 2}, {3, 4}));
    CHECK_FALSE(in_region(zero, {0, 0}, {0, 0}));
    CHECK_THROWS_AS(score(distmult({1, 1}, 0), {1}, {1, 1}), DimensionMismatch);

    TranslationRelation squared{{1, 0}, 0, {}, {}, Distance::SquaredL2};
    CHECK(score(squared, {0, 0}, {2, 2}) == 5);
    TranslationRelation stranse{{0, 1}, 0, RationalMatrix{{2, 0}, {0, 1}}, RationalMatrix{{1, 0}, {0, 0}}, Distance::L1};
    // M_h e + r = (2, 2), M_t f = (3, 0).
    CHECK(score(stranse, {1, 1}, {3, 5}) == 3);
}

TEST_CASE("DistMult regions are symmetric in their arguments") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> c(-5, 5);
    for (int trial = 0; trial < 300; ++trial) {
        RationalVector r(3), e(3), f(3);
        for (auto* v : {&r, &e, &f})
            for (auto& x : *v) x = Rational(c(rng), 2);
        auto rel = distmult(r, Rational(c(rng)));
        CHECK(in_region(rel, e, f) == in_region(rel, f, e));
    }
}

TEST_CASE("ComplEx block form matches complex arithmetic") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> c(-4, 4);
    for (int trial = 0; trial < 50; ++trial) {
        RationalVector rre(2), rim(2), ere(2), eim(2), fre(2), fim(2);
        for (auto* v : {&rre, &rim, &ere, &eim, &fre, &fim})
            for (auto& x : *v) x = c(rng);
        std::complex<double> s = 0;
        for (std::size_t i = 0; i < 2; ++i)
            s += std::complex<double>(to_double(ere[i]), to_double(eim[i])) *
                 std::complex<double>(to_double(rre[i]), to_double(rim[i])) *
                 std::conj(std::complex<double>(to_double(fre[i]), to_double(fim[i])));
        auto rel = complex_relation(rre, rim, 0);
        CHECK(to_double(score(rel, complex_embedding(ere, eim), complex_embedding(fre, fim))) == doctest::Approx(-s.real()));
    }
}

TEST_CASE("SimplE scores") {
    SimplERelation rel{{1, 2}, {3, 0}, 0, 0};
    SimplEEntity e{{1, 1}, {1, 0}}, f{{2, 0}, {0, 1}};
    // <e_h, r, f_t> = 2, <f_h, ri, e_t> = 6.
    CHECK(score(rel, e, f) == -4);
    CHECK(in_region(rel, e, f));
    rel.lambda_r = -3;
    CHECK_FALSE(in_region(rel, e, f));
}

TEST_CASE("separation examples") {
    std::map<std::string, RationalVector> emb{{"e", {0}}, {"f", {1}}};
    std::map<std::string, Relation> rels{{"R", TranslationRelation{{1}, 0, {}, {}, Distance::L1}}};
    CHECK(separates(emb, rels, {}, {}));
    auto res = separates(emb, rels, {{"e", "R", "f"}}, {{"f", "R", "e"}});
    CHECK(res.ok);
    CHECK(score(rels.at("R"), {1}, {0}) == 2);
    auto bad = separates(emb, rels, {{"f", "R", "e"}}, {});
    CHECK_FALSE(bad.ok);
    CHECK(bad.failure == Triple{"f", "R", "e"});
    CHECK_THROWS_AS(separates(emb, rels, {{"x", "R", "e"}}, {}), UnknownEntity);
    CHECK_THROWS_AS(separates(emb, rels, {{"e", "Q", "e"}}, {}), UnknownRelation);

    // DistMult cannot tell (a, b) from (b, a): any embedding fails one side.
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> c(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        RationalVector a(2), b(2), r(2);
        for (auto* v : {&a, &b, &r})
            for (auto& x : *v) x = c(rng);
        std::map<std::string, RationalVector> e2{{"a", a}, {"b", b}};
        std::map<std::string, Relation> r2{{"R", distmult(r, Rational(c(rng)))}};
        CHECK_FALSE(separates(e2, r2, {{"a", "R", "b"}}, {{"b", "R", "a"}}).ok);
    }
}

TEST_CASE("translation graph properties") {
    std::set<Triple> g{{"a", "R", "a"}, {"b", "R", "b"}, {"a", "R", "b"}};
    auto v = translation_graph_properties(g, {"a", "b"});
    CHECK(std::count(v.begin(), v.end(), GraphViolation{"R", GraphProperty::ReflexiveNotSymmetric, {"a", "b"}}) == 1);
    CHECK(std::count(v.begin(), v.end(), GraphViolation{"R", GraphProperty::PartialSaturation, {"a", "b"}}) == 1);
    CHECK(translation_graph_properties({}, {"a"}).empty());
    CHECK(translation_graph_properties(g, {}).empty());

    std::set<Triple> sat{{"e", "R", "s1"}, {"e", "R", "s2"}, {"f", "R", "s1"}};
    auto w = translation_graph_properties(sat, {"s1", "s2"});
    REQUIRE(w.size() == 1);
    CHECK(w[0] == GraphViolation{"R", GraphProperty::PartialSaturation, {"e", "f"}});

    std::set<Triple> chain{{"a", "R", "a"}, {"b", "R", "b"}, {"c", "R", "c"}, {"a", "R", "b"}, {"b", "R", "a"},
                           {"b", "R", "c"}, {"c", "R", "b"}};
    auto t = translation_graph_properties(chain, {"a", "b", "c"});
    CHECK(std::count(t.begin(), t.end(), GraphViolation{"R", GraphProperty::ReflexiveNotTransitive, {"a", "b", "c"}}) == 1);

    std::set<Triple> clique;
    for (auto x : {"a", "b"})
        for (auto y : {"a", "b"}) clique.insert({x, "R", y});
    CHECK(translation_graph_properties(clique, {"a", "b"}).empty());
}

TEST_CASE("bilinear subsumption examples") {
    auto same = bilinear_rule_decision(identity(2), 1, identity(2), 1);
    CHECK(same.kind == Kind::Satisfied);
    CHECK(same.reason == Reason::Proportional);
    CHECK(same.alpha == Rational(1));

    auto twice = bilinear_rule_decision(identity(2, 2), 1, identity(2), Rational(1, 2));
    CHECK(twice.satisfied());
    CHECK(twice.alpha == Rational(2));
    check_counterexample(identity(2, 2), 1, identity(2), 1, bilinear_rule_decision(identity(2, 2), 1, identity(2), 1));

    RationalMatrix d10{{1, 0}, {0, 0}}, d01{{0, 0}, {0, 1}};
    for (Rational ls : {Rational(1, 3), Rational(1), Rational(7)}) {
        auto d = bilinear_rule_decision(d10, 1, d01, ls);
        check_counterexample(d10, 1, d01, ls, d);
        CHECK(d.construction == "row-support");
    }
    // M_s = diag(1, 0) shares no row or column with the extra entry of M_r.
    auto gap = bilinear_rule_decision(identity(2), 1, d10, 0);
    check_counterexample(identity(2), 1, d10, 0, gap);
    CHECK(gap.construction == "slice");
    check_counterexample(identity(2), 1, d10, 1, bilinear_rule_decision(identity(2), 1, d10, 1));

    const RationalMatrix zero(2, RationalVector(2, Rational(0)));
    CHECK(bilinear_rule_decision(zero, 1, identity(2), 5).reason == Reason::BodyUnsatisfiable);
    CHECK(bilinear_rule_decision(zero, 0, zero, 0).reason == Reason::HeadTrivial);
    CHECK(bilinear_rule_decision(identity(2), 3, zero, -1).reason == Reason::HeadTrivial);
    check_counterexample(zero, 0, zero, 1, bilinear_rule_decision(zero, 0, zero, 1));
    check_counterexample(zero, -2, identity(2), 0, bilinear_rule_decision(zero, -2, identity(2), 0));
    check_counterexample(identity(2), 1, zero, 1, bilinear_rule_decision(identity(2), 1, zero, 1));
    auto neg = bilinear_rule_decision(identity(2, -1), 1, identity(2), -5);
    check_counterexample(identity(2, -1), 1, identity(2), -5, neg);
    CHECK(neg.alpha == Rational(-1));

    CHECK_THROWS_AS(bilinear_rule_decision(identity(2), 1, identity(3), 1), DimensionMismatch);
}

TEST_CASE("non-proportional matrices always yield verified counterexamples") {
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> lam(-3, 3);
    std::map<std::string, int> constructions;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
        const double zeros = (trial % 3) * 0.3;
        auto mr = random_matrix(rng, n, zeros), ms = random_matrix(rng, n, zeros);
        const Rational lr(lam(rng)), ls(lam(rng));
        auto d = bilinear_rule_decision(mr, lr, ms, ls);
        if (proportionality_factor(mr, ms)) continue;
        if (std::all_of(ms.begin(), ms.end(), [](const RationalVector& r) {
                return std::all_of(r.begin(), r.end(), [](const Rational& x) { return x == 0; });
            }) && ls <= 0)
            continue;
        check_counterexample(mr, lr, ms, ls, d);
        ++constructions[d.construction];
    }
    CHECK(constructions.size() >= 3);
}

TEST_CASE("proportional pairs are decided by the threshold ratio") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> num(1, 8), lam(-4, 4);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        auto ms = random_matrix(rng, n, 0.2);
        ms[0][0] = 1;
        const Rational alpha(num(rng), num(rng));
        auto mr = scale(ms, alpha);
        const Rational lr(lam(rng)), ls(lam(rng));
        auto d = bilinear_rule_decision(mr, lr, ms, ls);
        REQUIRE(d.alpha);
        CHECK(*d.alpha == alpha);
        CHECK(scale(ms, *d.alpha) == mr);
        if (lr / alpha >= ls) {
            CHECK(d.satisfied());
            auto f = falsify_bilinear(mr, lr, ms, ls, 20000, static_cast<std::uint64_t>(trial));
            CHECK(f.violations == 0);
        } else {
            check_counterexample(mr, lr, ms, ls, d);
        }
    }
}

TEST_CASE("falsification finds violations of non-subsumed pairs and is thread independent") {
    RationalMatrix d10{{1, 0}, {0, 0}}, d01{{0, 0}, {0, 1}};
    auto par = falsify_bilinear(d10, 1, d01, 1, 5000, 7);
    auto ser = falsify_bilinear_serial(d10, 1, d01, 1, 5000, 7);
    CHECK(par.samples == 5000);
    CHECK(par.violations > 0);
    CHECK(par.violations == ser.violations);
    REQUIRE(par.first_violation);
    CHECK(par.first_violation == ser.first_violation);
    const auto& [e, f] = *par.first_violation;
    CHECK(form_oracle(d10, e, f) >= 1);
    CHECK(form_oracle(d01, e, f) < 1);
    CHECK(falsify_bilinear(d10, 1, d01, 1, 0, 7).violations == 0);
}

TEST_CASE("hierarchy shapes") {
    const auto ms = identity(2);
    auto one = bilinear_hierarchy_shape({{identity(2, 4), 1}, {identity(2, 1), 1}, {identity(2, 2), 1}}, ms, Rational(1, 8));
    CHECK(one.positive == std::vector<std::size_t>{1, 2, 0});
    CHECK(one.nonpositive.empty());

    auto single = bilinear_hierarchy_shape({{identity(2), 1}}, ms, 1);
    CHECK(single.positive == std::vector<std::size_t>{0});

    const RationalMatrix zero(2, RationalVector(2, Rational(0)));
    auto mixed = bilinear_hierarchy_shape(
        {{identity(2, 1), 1}, {identity(2, 2), -1}, {identity(2, 1), -1}, {zero, 3}, {identity(2, 1), 0}}, ms, -2);
    CHECK(mixed.positive == std::vector<std::size_t>{3, 0});
    CHECK(mixed.nonpositive == std::vector<std::size_t>{4, 1, 2});

    CHECK_THROWS_AS(bilinear_hierarchy_shape({{identity(2), 1}, {identity(2), 0}}, ms, 1), NotAllSatisfied);
    CHECK_THROWS_AS(bilinear_hierarchy_shape({{identity(2), 1}}, zero, 0), std::invalid_argument);
}

TEST_CASE("betweenness chain for translation regions") {
    const Polytope ch(1, {{0}, {2}}), cm(1, {{1}}), cw(1, {{1}});
    auto steps = translation_subsumption_demo(ch, cw, cm);
    REQUIRE(steps.size() == 1);
    const auto& s = steps[0];
    CHECK(s.q == Point{1});
    CHECK(s.p == Point{0});
    CHECK(s.r == Point{1});
    CHECK(s.shifted == Point{2});
    CHECK(s.q_in_husband);
    CHECK(s.q[0] * 2 == s.p[0] + s.shifted[0]);

    CHECK(translation_subsumption_demo(ch, Polytope(1), cm).empty());

    try {
        translation_subsumption_demo(Polytope(1, {{0}, {1}}), cw, cm);
        FAIL("expected a premise violation");
    } catch (const PremiseViolated& e) {
        CHECK(e.premise == Premise::SumInHusband);
        CHECK(e.witness == Point{2});
    }
    try {
        translation_subsumption_demo(Polytope(1, {{5}, {9}}), Polytope(1, {{6}}), Polytope(1, {{2}, {3}}));
        FAIL("expected a premise violation");
    } catch (const PremiseViolated& e) {
        CHECK(e.premise == Premise::WifeCovered);
    }
    CHECK_THROWS_AS(translation_subsumption_demo(Polytope(2, {{0, 0}}), cw, cm), DimensionMismatch);

    // Two-dimensional boxes.
    const Polytope box_h(2, {{0, 0}, {4, 0}, {0, 4}, {4, 4}}), box_m(2, {{1, 1}}), box_w(2, {{1, 1}, {2, 1}, {1, 2}});
    for (const auto& st : translation_subsumption_demo(box_h, box_w, box_m)) CHECK(st.q_in_husband);
}

TEST_CASE("random interval triples never separate the wife region") {
    auto report = search_interval_triples(100, 0);
    CHECK(report.accepted == 100);
    CHECK(report.wife_not_contained == 0);
    CHECK(report.disjoint == 0);
    CHECK(report.tried >= report.accepted);
}

namespace {

SimplECompositionParameters random_simple(std::mt19937& rng, std::size_t n) {
    std::uniform_int_distribution<int> c(-4, 4);
    auto vec = [&] {
        RationalVector v(n);
        do {
            for (auto& x : v) x = Rational(c(rng), 2);
        } while (std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; }));
        return v;
    };
    SimplECompositionParameters p;
    p.r = vec(), p.ri = vec(), p.s = vec(), p.si = vec(), p.t = vec(), p.ti = vec();
    p.lambda_r = c(rng), p.lambda_ri = c(rng), p.lambda_s = c(rng), p.lambda_si = c(rng), p.lambda_t = c(rng),
    p.lambda_ti = c(rng);
    return p;
}

double tri(const RationalVector& a, const RationalVector& b, const RationalVector& c) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += to_double(a[i]) * to_double(b[i]) * to_double(c[i]);
    return s;
}

}  // namespace

TEST_CASE("SimplE composition witnesses") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 60; ++trial) {
        auto p = random_simple(rng, 2 + static_cast<std::size_t>(trial % 3));
        auto out = simple_composition_counterexample(p);
        REQUIRE(out.kind == SimplECompositionOutcome::Kind::Counterexample);
        REQUIRE(out.witness);
        const auto& w = *out.witness;
        CHECK(tri(w.e.head, p.r, w.f.tail) >= to_double(p.lambda_r));
        CHECK(tri(w.f.head, p.ri, w.e.tail) >= to_double(p.lambda_ri));
        CHECK(tri(w.f.head, p.s, w.g.tail) >= to_double(p.lambda_s));
        CHECK(tri(w.g.head, p.si, w.f.tail) >= to_double(p.lambda_si));
        CHECK(to_double(p.lambda_t) - tri(w.e.head, p.t, w.g.tail) >= 1e-9);
        // The SimplE regions agree: body relations hold, head relation fails.
        CHECK(in_region(SimplERelation{p.r, p.ri, -p.lambda_r, -p.lambda_ri}, w.e, w.f));
        CHECK(in_region(SimplERelation{p.s, p.si, -p.lambda_s, -p.lambda_si}, w.f, w.g));
        CHECK_FALSE(in_region(SimplERelation{p.t, p.ti, -p.lambda_t, -p.lambda_ti}, w.e, w.g));
    }
}

TEST_CASE("SimplE degenerate cases") {
    std::mt19937 rng(23);
    auto p = random_simple(rng, 3);
    p.t.assign(3, Rational(0));
    p.ti.assign(3, Rational(0));
    p.lambda_t = 0;
    p.lambda_ti = -1;
    CHECK(simple_composition_counterexample(p).kind == SimplECompositionOutcome::Kind::HeadAlwaysTrue);

    // Zero head vector with a positive threshold: the head never holds.
    p.lambda_ti = 1;
    auto head_never = simple_composition_counterexample(p);
    REQUIRE(head_never.witness);
    CHECK(composition_values(p, *head_never.witness).ti == 0);

    auto q = random_simple(rng, 3);
    q.r.assign(3, Rational(0));
    q.lambda_r = 2;
    CHECK(simple_composition_counterexample(q).kind == SimplECompositionOutcome::Kind::BodyUnsatisfiable);
    q.lambda_r = 0;
    CHECK(simple_composition_counterexample(q).kind == SimplECompositionOutcome::Kind::Counterexample);

    auto only_ti = random_simple(rng, 2);
    only_ti.t.assign(2, Rational(0));
    only_ti.lambda_t = -1;
    auto out = simple_composition_counterexample(only_ti);
    REQUIRE(out.witness);
    const auto v = composition_values(only_ti, *out.witness);
    CHECK(v.ti < only_ti.lambda_ti);
    CHECK(v.r >= only_ti.lambda_r);

    CHECK(sg(Rational(0)) == 1);
    CHECK(sg(Rational(-1, 3)) == -1);
    auto bad = random_simple(rng, 2);
    bad.t.push_back(1);
    CHECK_THROWS_AS(simple_composition_counterexample(bad), std::invalid_argument);
}
