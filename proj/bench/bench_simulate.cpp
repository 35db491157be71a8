// Serial reference against the OpenMP kernels on the same workload.
#include <benchmark/benchmark.h>

#include "mbexit/boundary.hpp"
#include "mbexit/reference.hpp"
#include "mbexit/simulate.hpp"

namespace {

mbexit::SimConfig workload(double T) {
    mbexit::SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.n_steps = 1000;
    cfg.T = T;
    cfg.seed = 7;
    return cfg;
}

void BM_DirectReference(benchmark::State& state) {
    const auto b = mbexit::Boundary::parse("1 - ln(1+t)");
    const auto cfg = workload(100.0);
    for (auto _ : state) benchmark::DoNotOptimize(mbexit::reference::estimate_exit_direct(b, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.n_paths));
}

void BM_DirectParallel(benchmark::State& state) {
    const auto b = mbexit::Boundary::parse("1 - ln(1+t)");
    const auto cfg = workload(100.0);
    mbexit::set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mbexit::estimate_exit_direct(b, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.n_paths));
}

void BM_GirsanovReference(benchmark::State& state) {
    const auto b = mbexit::Boundary::parse("1 + exp(-1*t)");
    const auto cfg = workload(10.0);
    for (auto _ : state) benchmark::DoNotOptimize(mbexit::reference::estimate_exit_girsanov(b, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.n_paths));
}

void BM_GirsanovParallel(benchmark::State& state) {
    const auto b = mbexit::Boundary::parse("1 + exp(-1*t)");
    const auto cfg = workload(10.0);
    mbexit::set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mbexit::estimate_exit_girsanov(b, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.n_paths));
}

}  // namespace

BENCHMARK(BM_DirectReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GirsanovReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GirsanovParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
