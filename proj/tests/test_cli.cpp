#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "geomodel/chase.hpp"
#include "geomodel/cli.hpp"
#include "geomodel/geometry.hpp"
#include "geomodel/rule_check.hpp"
#include "json.hpp"

using namespace geomodel;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "geomodel");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(GEOMODEL_DATA_DIR) + "/" + name; }

std::string temp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("geomodel_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli: embed then verify reproduces the chase model") {
    const auto geo = temp_path("ex1_geometry.json");
    auto e = run_cli({"embed", data("example1.dlg"), "-o", geo});
    REQUIRE(e.code == cli::kSuccess);
    auto v = run_cli({"verify", geo, data("example1.dlg")});
    CHECK(v.code == cli::kSuccess);
    CHECK(v.out.find("phi == M: true") != std::string::npos);
    auto c = run_cli({"check-rules", geo, data("example1.dlg")});
    CHECK(c.code == cli::kSuccess);
    auto p = run_cli({"probe", geo, data("example1.dlg"), "--trials", "10", "--seed", "5"});
    CHECK(p.code == cli::kSuccess);
    CHECK(p.out.find("seed: 5") != std::string::npos);
    fs::remove(geo);
}

TEST_CASE("cli: compact embedding also verifies") {
    const auto geo = temp_path("ex1_compact.json");
    REQUIRE(run_cli({"embed", data("example1.dlg"), "--compact", "-o", geo}).code == cli::kSuccess);
    auto eta = load_geometry_json(slurp(geo));
    CHECK(eta.m == 3);
    CHECK(run_cli({"verify", geo, data("example1.dlg")}).code == cli::kSuccess);
    fs::remove(geo);
}

TEST_CASE("cli: qc-check names the offending statement") {
    auto r = run_cli({"qc-check", data("example4.dlg")});
    CHECK(r.code == cli::kViolation);
    CHECK(r.out.find("constraint 1: NOT quasi-chained") != std::string::npos);
    CHECK(run_cli({"qc-check", data("example1.dlg")}).code == cli::kSuccess);
}

TEST_CASE("cli: midpoint probing of the pair constraint finds the violation") {
    const auto geo = temp_path("ex4_geometry.json");
    const auto report = temp_path("ex4_probe.json");
    REQUIRE(run_cli({"embed", data("example4.dlg"), "-o", geo}).code == cli::kSuccess);
    CHECK(run_cli({"check-rules", geo, data("example4.dlg")}).code == cli::kViolation);
    auto r = run_cli({"probe", geo, data("example4.dlg"), "--sampler", "midpoint", "--trials", "4", "--points", "1",
                      "-o", report});
    CHECK(r.code == cli::kViolation);
    auto loaded = load_probe_json(slurp(report));
    CHECK(loaded.violations() == 4);
    CHECK(dump_probe_json(loaded) == slurp(report));
    fs::remove(geo);
    fs::remove(report);
}

TEST_CASE("cli: chase outcomes and model dump") {
    const auto model = temp_path("ex1_model.json");
    auto r = run_cli({"chase", data("example1.dlg"), "-o", model});
    CHECK(r.code == cli::kSuccess);
    auto m = load_model_json(slurp(model));
    CHECK(m.size() == 6);
    CHECK(run_cli({"chase", data("example1.dlg"), "--max-steps", "1"}).code == cli::kResourceExceeded);
    fs::remove(model);
}

TEST_CASE("cli: helly breaks low-dimensional interpretations") {
    auto r = run_cli({"helly", "--n", "3", "--dim", "1", "--seed", "4"});
    CHECK(r.code == cli::kViolation);
    CHECK(r.out.find("helly point:") != std::string::npos);
    auto hi = run_cli({"helly", "--n", "4", "--dim", "3"});
    CHECK(hi.code == cli::kSuccess);
    CHECK(hi.out.find("no common point") != std::string::npos);
    CHECK(run_cli({"helly", "--n", "3", "--dim", "5"}).code == cli::kSuccess);
}

TEST_CASE("cli: limits subcommands") {
    auto b = run_cli({"limits", "bilinear", "--mr", "[[1,0],[0,0]]", "--lr", "1", "--ms", "[[0,1],[0,0]]", "--ls",
                      "1"});
    CHECK(b.code == cli::kViolation);
    CHECK(b.out.find("counterexample") != std::string::npos);
    auto s = run_cli({"limits", "bilinear", "--mr", "[[2,0],[0,2]]", "--lr", "2", "--ms", "[[1,0],[0,1]]", "--ls",
                      "1", "--samples", "2000", "--json"});
    CHECK(s.code == cli::kSuccess);
    auto j = nlohmann::json::parse(s.out);
    CHECK(j["verdict"] == "satisfied");
    CHECK(j["alpha"] == "2");
    CHECK(j["falsification"]["violations"] == 0);

    auto sim = run_cli({"limits", "simple", "--r", "[1,1]", "--ri", "[1,-1]", "--s", "[2,1]", "--si", "[1,1]", "--t",
                        "[1,0]", "--ti", "[0,1]"});
    CHECK(sim.code == cli::kViolation);

    CHECK(run_cli({"limits", "marriage", "--search", "10", "--seed", "3"}).code == cli::kSuccess);
    auto bad = run_cli({"limits", "marriage", "--ch", "[[0],[1]]", "--cw", "[[5]]", "--cm", "[[1]]"});
    CHECK(bad.code == cli::kViolation);

    auto g = run_cli({"limits", "graph-props", data("marriage_graph.txt"), "--subset", "a,b"});
    CHECK(g.code == cli::kViolation);
    CHECK(g.out.find("likes") != std::string::npos);

    auto sc = run_cli({"limits", "score", "--model", "transe", "--e", "[0,0]", "--f", "[1,2]", "--r", "[1,1]",
                       "--lambda", "1"});
    CHECK(sc.code == cli::kSuccess);
    CHECK(sc.out.find("score: 1\n") != std::string::npos);
    CHECK(sc.out.find("in region: yes") != std::string::npos);

    auto h = run_cli({"limits", "hierarchy", "--ms", "[[1]]", "--ls", "1", "--relations",
                      R"([{"m": [[2]], "lambda": 4}, {"m": [[1]], "lambda": 3}])"});
    CHECK(h.code == cli::kSuccess);
    CHECK(h.out.find("positive thresholds: R2 -> R1") != std::string::npos);
}

TEST_CASE("cli: usage errors exit 2") {
    CHECK(run_cli({}).code == cli::kUsageError);
    CHECK(run_cli({"frobnicate"}).code == cli::kUsageError);
    CHECK(run_cli({"parse", "/nonexistent.dlg"}).code == cli::kUsageError);
    const auto bad = temp_path("bad.dlg");
    std::ofstream(bad) << "Wife(anna\n";
    auto r = run_cli({"parse", bad});
    CHECK(r.code == cli::kUsageError);
    CHECK(r.err.find(":1:") != std::string::npos);
    fs::remove(bad);
    CHECK(run_cli({"limits", "bilinear", "--mr", "[[1", "--lr", "1", "--ms", "[[1]]", "--ls", "1"}).code ==
          cli::kUsageError);
}

TEST_CASE("cli: parse round trip") {
    const auto out = temp_path("ex1_rendered.dlg");
    REQUIRE(run_cli({"parse", data("example1.dlg"), "-o", out}).code == cli::kSuccess);
    const auto once = slurp(out);
    CHECK(parse_program(once) == parse_program(slurp(data("example1.dlg"))));
    auto again = run_cli({"parse", out});
    CHECK(again.out == once);
    auto j = nlohmann::json::parse(run_cli({"parse", data("example4.dlg"), "--json"}).out);
    CHECK(j["fragments"]["quasi_chained"] == false);
    CHECK(j["fragments"]["datalog"] == true);
    fs::remove(out);
}
