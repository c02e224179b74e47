// Serial vs parallel kernels: Monte Carlo paths and the premium curve grid.
// Thread count follows AFFINE_PREMIA_THREADS.

#include "premia/mc.hpp"
#include "premia/pricing.hpp"

#include <benchmark/benchmark.h>

using namespace premia;

namespace {

const ModelParams kParams{};
const MarketState kState{0.0, 2.5, 0.0625};
const MeasureChange kMeasure{0.0, -5.0, 0.45, 0.45};

void monte_carlo(benchmark::State& st, Execution exec) {
    PathConfig pc;
    pc.n_paths = static_cast<std::size_t>(st.range(0));
    pc.horizon = 30.0;
    pc.exec = exec;
    for (auto _ : st) {
        benchmark::DoNotOptimize(estimate_forward(kParams, kMeasure, kState, 30.0, SpotModel::geometric, pc));
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
    st.counters["threads"] = exec == Execution::serial ? 1 : worker_count();
}

void curve(benchmark::State& st, Execution exec) {
    std::vector<double> taus;
    for (int i = 0; i <= st.range(0); ++i) taus.push_back(i);
    for (auto _ : st) {
        benchmark::DoNotOptimize(premium_curve(kParams, kMeasure, kState, taus, SpotModel::geometric, exec, false));
    }
    st.SetItemsProcessed(st.iterations() * (st.range(0) + 1));
    st.counters["threads"] = exec == Execution::serial ? 1 : worker_count();
}

void BM_MonteCarloSerial(benchmark::State& st) { monte_carlo(st, Execution::serial); }
void BM_MonteCarloParallel(benchmark::State& st) { monte_carlo(st, Execution::parallel); }
void BM_CurveSerial(benchmark::State& st) { curve(st, Execution::serial); }
void BM_CurveParallel(benchmark::State& st) { curve(st, Execution::parallel); }

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveSerial)->Arg(360)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveParallel)->Arg(360)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
