// Serial reference vs OpenMP kernels on image-sized workloads: 196-element
// sets (a 14 x 14 grid) of 64 channels, 100 projections, 10 bins.

#include <benchmark/benchmark.h>

#include <vector>

#include "sinbad/kernels.hpp"
#include "sinbad/rng.hpp"

using namespace sinbad;

namespace {

constexpr Index kElements = 196;
constexpr Index kDims = 64;
constexpr Index kProjections = 100;
constexpr int kBins = 10;

std::vector<ElementSet> make_sets(int n) {
    Xoshiro256 rng(42);
    std::vector<ElementSet> sets;
    for (int s = 0; s < n; ++s) {
        RowMatrix m(kElements, kDims);
        for (Index i = 0; i < kElements; ++i)
            for (Index j = 0; j < kDims; ++j) m(i, j) = rng.normal();
        sets.emplace_back(std::move(m));
    }
    return sets;
}

kernels::Backend backend_of(const benchmark::State& state) {
    return state.range(1) ? kernels::Backend::openmp : kernels::Backend::serial;
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(1) ? "openmp x" + std::to_string(kernels::num_threads()) : "serial");
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ProjectAll(benchmark::State& state) {
    const auto sets = make_sets(static_cast<int>(state.range(0)));
    const auto projection = make_projection(1, kDims, kProjections, ProjectionKind::gaussian);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::project_all(sets, projection, backend_of(state)));
    label(state);
}

void BM_DescribeAll(benchmark::State& state) {
    const auto sets = make_sets(static_cast<int>(state.range(0)));
    const auto projected =
        kernels::project_all(sets, make_projection(1, kDims, kProjections, ProjectionKind::gaussian));
    const auto edges = fit_bin_edges(projected, kBins, EdgeMode::uniform);
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::describe_all(projected, edges, HistogramKind::cumulative, backend_of(state)));
    label(state);
}

void BM_KnnScores(benchmark::State& state) {
    const Index n = state.range(0);
    const Index d = kProjections * (kBins - 1);
    Xoshiro256 rng(7);
    RowMatrix reference(n, d), queries(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) {
            reference(i, j) = rng.normal();
            queries(i, j) = rng.normal();
        }
    for (auto _ : state) benchmark::DoNotOptimize(kernels::knn_scores(reference, queries, 1, false, backend_of(state)));
    label(state);
}

} // namespace

BENCHMARK(BM_ProjectAll)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DescribeAll)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnScores)->ArgsProduct({{100, 400}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
