// OpenMP versus serial paths of the data-parallel kernels.
//
//   ./bench_kernels --benchmark_filter=argmin
//
// Each benchmark takes the execution mode as its argument (0 serial, 1 parallel).

#include "pfbe/bench.hpp"
#include "pfbe/kernels.hpp"
#include "pfbe/lagrangian.hpp"
#include "pfbe/problems.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace pfbe;

Execution mode(const benchmark::State &state) {
    return state.range(0) ? Execution::parallel : Execution::serial;
}

void BM_GridMinGamma(benchmark::State &state) {
    const auto lp = lift(make_synthetic(SyntheticInstance::scalar()));
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    const auto side = static_cast<std::size_t>(state.range(1));
    const TensorGrid grid{{uniform_axis(0, 1, side), uniform_axis(0, 2, side),
                           uniform_axis(-2, 2, side)}};
    for (auto _ : state)
        benchmark::DoNotOptimize(grid_min_gamma(lp.mm, cfg, grid, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_GridMinGamma)->ArgsProduct({{0, 1}, {50, 100}})->Unit(benchmark::kMillisecond);

void BM_BruteForceValue(benchmark::State &state) {
    const auto ex = make_example1();
    std::vector<Vec> xs;
    for (double x : uniform_axis(1, 10, 400))
        xs.push_back(Vec::Constant(1, x));
    const TensorGrid ys{{uniform_axis(-1, 11, static_cast<std::size_t>(state.range(1)))}};
    for (auto _ : state)
        benchmark::DoNotOptimize(brute_force_value_function(ex, xs, ys, state.range(0) != 0));
}
BENCHMARK(BM_BruteForceValue)->ArgsProduct({{0, 1}, {400, 2000}})->Unit(benchmark::kMillisecond);

void BM_GdaStepSelection(benchmark::State &state) {
    const auto cp = make_synthetic(10, 10, 1.0, 1);
    const auto lp = lift(cp);
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    const auto st = default_start(cp);
    SolverConfig s;
    s.max_iter = 2000;
    const std::vector<std::pair<int, int>> grid{{1, 1}, {5, 1}, {1, 2}, {5, 2}, {1, 3}};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            select_gda_steps(lp.mm, cfg, s, lp.join(st.x, st.lambda), st.y, grid, mode(state)));
}
BENCHMARK(BM_GdaStepSelection)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State &state) {
    std::vector<RunConfig> configs;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        RunConfig cfg;
        cfg.n = cfg.p = 20;
        cfg.seed = seed;
        configs.push_back(cfg);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(sweep(configs, mode(state)));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
