#include "doctest.h"

#include "geomodel/chase.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace geomodel;

namespace {

const char* kExample1 = R"(
Wife(X), Married(X,Y) -> Husband(Y).
Wife(Y) -> exists X. Husband(X), Married(X,Y).
Husband(X), Wife(X) -> false.
Wife(anna). Wife(marie).
)";

Atom fact(std::string rel, std::vector<std::string> args) {
    Atom a{std::move(rel), {}};
    for (auto& s : args) a.args.push_back(object_from_name(s));
    return a;
}

Interpretation example1_model() {
    return {fact("Wife", {"anna"}),          fact("Wife", {"marie"}),
            fact("Husband", {"_n1"}),        fact("Married", {"_n1", "anna"}),
            fact("Husband", {"_n2"}),        fact("Married", {"_n2", "marie"})};
}

}  // namespace

TEST_CASE("chase of the marriage example") {
    auto kb = parse_program(kExample1);
    auto res = chase(kb);
    REQUIRE(res.outcome == ChaseResult::Outcome::Model);
    CHECK(res.atoms.size() == 6);
    CHECK(equal_up_to_null_renaming(res.atoms, example1_model()));
    CHECK(res.atoms == example1_model());
    CHECK(is_model(res.atoms, kb));
    CHECK(oracle::is_model(res.atoms, kb));
}

TEST_CASE("chase reports a violated constraint with its grounding") {
    auto kb = parse_program("Husband(X), Wife(X) -> false. Husband(a). Wife(a).");
    auto res = chase(kb);
    REQUIRE(res.outcome == ChaseResult::Outcome::Unsatisfiable);
    REQUIRE(res.violation);
    CHECK(res.violation->constraint == 0);
    CHECK(res.violation->grounding.at("X") == Term::constant("a"));
}

TEST_CASE("chase of a fact-only knowledge base") {
    auto kb = parse_program("R(a,b).");
    auto res = chase(kb);
    CHECK(res.outcome == ChaseResult::Outcome::Model);
    CHECK(res.atoms == kb.database);
}

TEST_CASE("chase refuses ontologies without a termination certificate") {
    auto kb = parse_program("R(X) -> exists Y. S(X,Y). S(X,Y) -> R(Y). R(a).");
    CHECK_THROWS_AS(chase(kb), NotGuaranteedTerminating);
}

TEST_CASE("chase stops at the step budget") {
    auto kb = parse_program("R(X) -> exists Y. S(X,Y). R(a). R(b). R(c).");
    auto res = chase(kb, 2);
    CHECK(res.outcome == ChaseResult::Outcome::ResourceExceeded);
    CHECK(res.steps == 2);
}

TEST_CASE("chase continues null numbering after existing nulls") {
    auto kb = parse_program("R(X) -> exists Y. S(X,Y).");
    Interpretation start{fact("R", {"_n4"})};
    auto res = chase(kb.ontology, start);
    REQUIRE(res.outcome == ChaseResult::Outcome::Model);
    CHECK(res.atoms.count(fact("S", {"_n4", "_n5"})));
}

TEST_CASE("model checks") {
    auto kb = parse_program(kExample1);
    CHECK(is_model(example1_model(), kb));
    Interpretation bad{fact("Married", {"anna", "marie"}), fact("Husband", {"marie"}), fact("Wife", {"anna"}),
                       fact("Wife", {"marie"})};
    auto check = is_model(bad, kb);
    CHECK_FALSE(check);
    CHECK_FALSE(check.violation.empty());
    CHECK_FALSE(oracle::is_model(bad, kb));
    CHECK(is_model({}, KnowledgeBase{}));
}

TEST_CASE("datalog fixpoint examples") {
    auto one = datalog_fixpoint(parse_program("R(X,Y) -> S(X,Y). R(a,b)."));
    CHECK(one.atoms == Interpretation{fact("R", {"a", "b"}), fact("S", {"a", "b"})});

    auto helly = parse_program(
        "A1(X), A2(X), A3(X) -> false. A1(a2). A1(a3). A2(a1). A2(a3). A3(a1). A3(a2).");
    auto h = datalog_fixpoint(helly);
    CHECK(h.outcome == ChaseResult::Outcome::Model);
    CHECK(h.atoms == helly.database);

    auto tc = parse_program("E(X,Y) -> T(X,Y). T(X,Y), E(Y,Z) -> T(X,Z). E(a,b). E(b,c). E(c,d). E(d,a).");
    auto res = datalog_fixpoint(tc);
    // Independent reachability by Warshall's algorithm.
    const std::vector<std::string> names{"a", "b", "c", "d"};
    bool reach[4][4] = {};
    for (int i = 0; i < 4; ++i) reach[i][(i + 1) % 4] = true;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) reach[i][j] |= reach[i][k] && reach[k][j];
    std::size_t t_atoms = 0;
    for (const auto& a : res.atoms) t_atoms += a.relation == "T";
    std::size_t expected = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (reach[i][j]) {
                ++expected;
                CHECK(res.atoms.count(fact("T", {names[i], names[j]})));
            }
    CHECK(expected == 16);
    CHECK(t_atoms == 16);
    CHECK_THROWS_AS(datalog_fixpoint(parse_program(kExample1)), NotDatalog);
}

TEST_CASE("chase agrees with the naive fixpoint on random datalog") {
    gen::Shape shape;
    gen::KbGenerator g(21, shape);
    for (int i = 0; i < 150; ++i) {
        auto kb = g.next();
        auto a = chase(kb);
        auto b = datalog_fixpoint(kb);
        REQUIRE(a.outcome == b.outcome);
        if (a.outcome == ChaseResult::Outcome::Model) {
            CHECK(a.atoms == b.atoms);
            CHECK(a.atoms == oracle::naive_multi_head_fixpoint(kb.ontology.rules, kb.database));
        }
    }
}

TEST_CASE("chase models pass both model checks") {
    gen::Shape shape;
    shape.existential = true;
    shape.max_constants = 4;
    gen::KbGenerator g(8, shape);
    int models = 0;
    for (int i = 0; i < 200; ++i) {
        auto kb = g.next();
        if (!is_weakly_acyclic(kb.ontology)) continue;
        auto res = chase(kb);
        CHECK(res.steps <= kDefaultMaxSteps);
        if (res.outcome != ChaseResult::Outcome::Model) continue;
        ++models;
        CHECK(is_model(res.atoms, kb));
        CHECK(oracle::is_model(res.atoms, kb));
    }
    CHECK(models > 50);
}

TEST_CASE("chase is monotone in the database") {
    gen::Shape shape;
    shape.existential = true;
    shape.constraints = false;
    shape.max_constants = 4;
    gen::KbGenerator g(99, shape);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 60; ++i) {
        auto kb = g.next();
        if (!is_weakly_acyclic(kb.ontology) || kb.database.size() < 2) continue;
        KnowledgeBase smaller = kb;
        smaller.database.erase(smaller.database.begin());
        auto small = chase(smaller);
        auto big = chase(kb);
        REQUIRE(small.outcome == ChaseResult::Outcome::Model);
        REQUIRE(big.outcome == ChaseResult::Outcome::Model);
        if (small.atoms.size() > 14) continue;  // keep the homomorphism search small
        CHECK(homomorphically_embeds(small.atoms, big.atoms));
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("model dump round trip") {
    auto text = dump_model_json(example1_model());
    CHECK(load_model_json(text) == example1_model());
    CHECK(dump_model_json(load_model_json(text)) == text);
    CHECK(text.find("\"rel\": \"Husband\"") < text.find("\"rel\": \"Married\""));
    CHECK_THROWS_AS(load_model_json("{"), FormatError);
    CHECK_THROWS_AS(load_model_json(R"({"atoms":[{"rel":"R","args":["X"]}]})"), FormatError);
    CHECK_THROWS_AS(load_model_json(R"({"atoms":[{"rel":"R","args":["a"]},{"rel":"R","args":["a","b"]}]})"),
                    FormatError);
}

TEST_CASE("null renaming equality") {
    Interpretation a{fact("R", {"_n1", "_n2"})};
    Interpretation b{fact("R", {"_n7", "_n3"})};
    Interpretation c{fact("R", {"_n1", "_n1"})};
    CHECK(equal_up_to_null_renaming(a, b));
    CHECK_FALSE(equal_up_to_null_renaming(a, c));
    CHECK(homomorphically_embeds(a, c));
    CHECK_FALSE(homomorphically_embeds(Interpretation{fact("R", {"a", "_n1"})}, b));
}
