// Serial reference against the OpenMP kernels on the same grids.
#include "loewner/catalog.hpp"
#include "loewner/chain.hpp"
#include "loewner/verifier.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace loewner;

const HerglotzDriver& radial()
{
    static const HerglotzDriver d = radial_driver(TimeFunction::constant(0.0));
    return d;
}

std::vector<cplx> grid(int angles)
{
    const std::vector<double> radii{0.2, 0.4, 0.6, 0.8};
    return disk_grid(radii, angles);
}

void evolve(benchmark::State& state, Execution exec)
{
    const auto pts = grid(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto out = evolve_grid(radial(), pts, 0.0, 2.0, {}, true, exec);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}

void chain(benchmark::State& state, Execution exec)
{
    const auto pts = grid(static_cast<int>(state.range(0)));
    const std::vector<double> s{0.0, 1.0};
    for (auto _ : state) {
        auto out = chain_grid(radial(), s, pts, {}, exec);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(2 * pts.size()));
}

void BM_EvolveSerial(benchmark::State& s) { evolve(s, Execution::Serial); }
void BM_EvolveParallel(benchmark::State& s) { evolve(s, Execution::Parallel); }
void BM_ChainSerial(benchmark::State& s) { chain(s, Execution::Serial); }
void BM_ChainParallel(benchmark::State& s) { chain(s, Execution::Parallel); }

} // namespace

BENCHMARK(BM_EvolveSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvolveParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
