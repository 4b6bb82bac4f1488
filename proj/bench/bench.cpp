// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "generators.hpp"
#include "geomodel/chase.hpp"
#include "geomodel/embedding_limits.hpp"
#include "geomodel/geometry.hpp"
#include "geomodel/rule_check.hpp"

using namespace geomodel;

namespace {

struct Fixture {
    KnowledgeBase kb;
    GeometricInterpretation eta;
};

// Largest model among a batch of random quasi-chained knowledge bases.
const Fixture& fixture() {
    static const Fixture f = [] {
        gen::Shape shape;
        shape.existential = true;
        shape.quasi_chained = true;
        shape.max_facts = 14;
        gen::KbGenerator g(11, shape);
        Fixture best;
        std::size_t size = 0;
        for (int i = 0; i < 300; ++i) {
            auto kb = g.next();
            if (!is_weakly_acyclic(kb.ontology)) continue;
            auto res = chase(kb, 2000);
            if (res.outcome != ChaseResult::Outcome::Model || res.atoms.size() <= size) continue;
            size = res.atoms.size();
            best = {kb, build_prop3_model(res.atoms, kb.constants(), kb.arities)};
        }
        return best;
    }();
    return f;
}

void BM_phi_parallel(benchmark::State& state) {
    const auto& f = fixture();
    const auto objs = f.eta.objects();
    for (auto _ : state) benchmark::DoNotOptimize(phi(f.eta, objs));
}

void BM_phi_serial(benchmark::State& state) {
    const auto& f = fixture();
    const auto objs = f.eta.objects();
    for (auto _ : state) benchmark::DoNotOptimize(phi_serial(f.eta, objs));
}

ProbeOptions probe_options() {
    ProbeOptions opt;
    opt.trials = 16;
    opt.points = 3;
    opt.seed = 7;
    return opt;
}

void BM_probe_parallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(probe_extension(f.eta, f.kb, probe_options()));
}

void BM_probe_serial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(probe_extension_serial(f.eta, f.kb, probe_options()));
}

RationalMatrix diagonal(std::size_t n) {
    RationalMatrix m(n, RationalVector(n));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Rational(static_cast<int>(i) + 1, 2);
    return m;
}

void BM_falsify_parallel(benchmark::State& state) {
    const auto ms = diagonal(4);
    for (auto _ : state) benchmark::DoNotOptimize(falsify_bilinear(ms, Rational(2), ms, Rational(1), 100000, 3));
}

void BM_falsify_serial(benchmark::State& state) {
    const auto ms = diagonal(4);
    for (auto _ : state)
        benchmark::DoNotOptimize(falsify_bilinear_serial(ms, Rational(2), ms, Rational(1), 100000, 3));
}

}  // namespace

BENCHMARK(BM_phi_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_phi_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_probe_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_probe_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_falsify_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_falsify_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
