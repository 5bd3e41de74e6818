#include <benchmark/benchmark.h>

#include "takens/analysis.hpp"
#include "takens/embedding.hpp"
#include "takens/generators.hpp"
#include "takens/kernels.hpp"

using namespace takens;

namespace {

PhasePortrait henon_portrait(std::size_t n)
{
    return delay_embed(normalize(henon_series(0.0, 0.0, MapParams{}, n).x), {2, 1});
}

void BM_PairsExactReference(benchmark::State& state)
{
    const auto portrait = henon_portrait(static_cast<std::size_t>(state.range(0)));
    const auto radii = log_radii(1e-3, portrait_extent(portrait));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::reference::count_pairs_exact(portrait, radii, 2));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kernels::admissible_pairs(portrait.size(), 2)));
}

void BM_PairsExactParallel(benchmark::State& state)
{
    const auto portrait = henon_portrait(static_cast<std::size_t>(state.range(0)));
    const auto radii = log_radii(1e-3, portrait_extent(portrait));
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::count_pairs_exact(portrait, radii, 2, workers));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kernels::admissible_pairs(portrait.size(), 2)));
}

void BM_PairsSampled(benchmark::State& state)
{
    const auto portrait = henon_portrait(50000);
    const auto radii = log_radii(1e-3, portrait_extent(portrait));
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::count_pairs_sampled(portrait, radii, 2, 10'000'000, 1, workers));
    }
}

// The reference k-NN scans every earlier point; the parallel one uses the grid.
void BM_KnnReference(benchmark::State& state)
{
    const auto portrait = delay_embed(iid_uniform(static_cast<std::size_t>(state.range(0)), 1), {3, 1});
    const std::size_t first = portrait.size() * 3 / 4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::reference::knn_earlier(portrait, first, portrait.size(), 4, 3));
    }
}

void BM_KnnParallel(benchmark::State& state)
{
    const auto portrait = delay_embed(iid_uniform(static_cast<std::size_t>(state.range(0)), 1), {3, 1});
    const std::size_t first = portrait.size() * 3 / 4;
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::knn_earlier(portrait, first, portrait.size(), 4, 3, workers));
    }
}

} // namespace

BENCHMARK(BM_PairsExactReference)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PairsExactParallel)->Args({2000, 1})->Args({2000, 4})->Args({8000, 1})->Args({8000, 4})
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PairsSampled)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KnnReference)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KnnParallel)->Args({5000, 1})->Args({5000, 4})->Args({20000, 1})->Args({20000, 4})
    ->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
