#include <benchmark/benchmark.h>

#include "adp/graph.hpp"
#include "adp/orders.hpp"
#include "adp/parser.hpp"
#include "adp/prover.hpp"
#include "adp/simulator.hpp"

namespace {

adp::ParsedInput load(const std::string& name) { return adp::parse_file(std::string(ADP_CORPUS_DIR) + "/" + name); }

adp::Term deep(const std::string& f, int depth, const std::string& leaf) {
    adp::Term t = adp::parse_term(leaf, {"x", "y"});
    for (int i = 0; i < depth; ++i) t = adp::Term::app(f, {t, t});
    return t;
}

void BM_Unify(benchmark::State& state) {
    int d = static_cast<int>(state.range(0));
    adp::Term s = deep("f", d, "x");
    adp::Term t = deep("f", d, "a");
    for (auto _ : state) benchmark::DoNotOptimize(adp::unify(s, t));
}
BENCHMARK(BM_Unify)->Arg(4)->Arg(8)->Arg(12);

void BM_DependencyGraph(benchmark::State& state) {
    auto P = adp::canonical_adps(load("r_alg.ptrs").ptrs);
    for (auto _ : state) benchmark::DoNotOptimize(adp::estimate_dep_graph(P, adp::Mode::Innermost));
}
BENCHMARK(BM_DependencyGraph);

void BM_ReductionPair(benchmark::State& state) {
    auto P = adp::canonical_adps(load("r2.ptrs").ptrs);
    adp::SolverConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(adp::proc_reduction_pair(P, adp::Mode::Innermost, cfg));
}
BENCHMARK(BM_ReductionPair)->Unit(benchmark::kMillisecond);

void BM_ProveR2(benchmark::State& state) {
    auto R = load("r2.ptrs").ptrs;
    adp::ProverConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(adp::prove(R, cfg));
}
BENCHMARK(BM_ProveR2)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
    auto R = load("r_rw.ptrs").ptrs;
    adp::SimConfig cfg;
    cfg.samples = static_cast<std::size_t>(state.range(0));
    cfg.step_cap = 2000;
    cfg.seed = 1;
    adp::Term start = adp::parse_term("g");
    for (auto _ : state) benchmark::DoNotOptimize(adp::estimate_termination(R, start, cfg));
}
BENCHMARK(BM_MonteCarlo)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ExactSimulation(benchmark::State& state) {
    auto R = load("r1.ptrs").ptrs;
    adp::SimConfig cfg;
    cfg.depth_cap = static_cast<std::size_t>(state.range(0));
    adp::Term start = adp::parse_term("g");
    for (auto _ : state) benchmark::DoNotOptimize(adp::estimate_termination(R, start, cfg));
}
BENCHMARK(BM_ExactSimulation)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
