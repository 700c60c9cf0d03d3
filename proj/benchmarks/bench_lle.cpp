#include <benchmark/benchmark.h>

#include "lle/core.hpp"
#include "lle/dataset.hpp"
#include "lle/neighbors.hpp"
#include "lle/scalable.hpp"

using namespace lle;

static void BM_PairwiseEuclidean(benchmark::State& state) {
    const auto [x, params] =
        dataset::generate_swiss_roll(state.range(0), 0.0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(neighbors::pairwise_euclidean(x));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairwiseEuclidean)->Arg(200)->Arg(400)->Arg(800)->Complexity();

static void BM_ReconstructionWeights(benchmark::State& state) {
    const auto [x, params] =
        dataset::generate_swiss_roll(state.range(0), 0.0, 1);
    const NeighborGraph g =
        neighbors::knn_graph(neighbors::pairwise_euclidean(x), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(core::reconstruction_weights(x, g, 1e-3));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ReconstructionWeights)->Arg(200)->Arg(400)->Arg(800)->Complexity();

static void BM_FullLle(benchmark::State& state) {
    const auto [x, params] =
        dataset::generate_swiss_roll(state.range(0), 0.0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(core::lle(x, 10, 2));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FullLle)->Arg(200)->Arg(400)->Arg(800)->Complexity();

static void BM_GeodesicDistances(benchmark::State& state) {
    const auto [x, params] =
        dataset::generate_swiss_roll(state.range(0), 0.0, 1);
    const Matrix d = neighbors::pairwise_euclidean(x);
    for (auto _ : state) {
        benchmark::DoNotOptimize(neighbors::geodesic_distances(d, 10));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GeodesicDistances)->Arg(200)->Arg(400)->Complexity();

static void BM_NystromLle(benchmark::State& state) {
    const auto [x, params] = dataset::generate_swiss_roll(800, 0.0, 1);
    const auto lm = scalable::select_landmarks(
        800, state.range(0), scalable::LandmarkStrategy::Stride);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scalable::nystrom_lle(x, 10, 2, lm));
    }
}
BENCHMARK(BM_NystromLle)->Arg(40)->Arg(80)->Arg(160);

BENCHMARK_MAIN();
