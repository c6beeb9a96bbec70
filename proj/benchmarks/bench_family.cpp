#include "pacset/family.hpp"
#include "pacset/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace pacset;

namespace {

const std::vector<CalibrationRecord>& corpus() {
    static const auto records = [] {
        SyntheticConfig cfg;
        cfg.seed = 31;
        cfg.p_corrupt = 0.05;
        return generate_synthetic(cfg, 256);
    }();
    return records;
}

LevelGrid grid(std::size_t levels) {
    std::vector<double> nlls;
    for (const auto& r : corpus()) nlls.push_back(leaf_nll_total(*r.predicted));
    return build_grid(nlls, levels, {.append_zero = true});
}

void run_method(benchmark::State& state, Method method) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    const LevelGrid g = grid(static_cast<std::size_t>(state.range(1)));
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& r = corpus()[i++ % corpus().size()];
        benchmark::DoNotOptimize(solve_family(method, *r.predicted, g, m));
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_Ilp(benchmark::State& state) { run_method(state, Method::Ilp); }
void BM_Greedy(benchmark::State& state) { run_method(state, Method::Greedy); }

void BM_Contains(benchmark::State& state) {
    const LevelGrid g = grid(8);
    std::vector<MonotoneFamily> families;
    for (const auto& r : corpus()) families.push_back(build_family(Method::Ilp, r.predicted, g, 2));
    std::size_t i = 0;
    for (auto _ : state) {
        const std::size_t j = i++ % families.size();
        const PartialTree& p = families[j].levels[j % g.size()];
        benchmark::DoNotOptimize(contains(p, *corpus()[j].truth));
    }
    state.SetItemsProcessed(state.iterations());
}

} // namespace

BENCHMARK(BM_Ilp)->ArgsProduct({{1, 2, 3}, {8, 32}});
BENCHMARK(BM_Greedy)->ArgsProduct({{1, 2, 3}, {8, 32}});
BENCHMARK(BM_Contains);
BENCHMARK_MAIN();
