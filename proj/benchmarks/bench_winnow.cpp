#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "winnow/clustering.hpp"
#include "winnow/merge_geometry.hpp"

namespace {

std::vector<winnow::Embedding> random_vectors(std::size_t n, std::size_t dim,
                                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<winnow::Embedding> vectors(n, winnow::Embedding(dim));
    for (auto& v : vectors) {
        for (auto& x : v) x = dist(rng);
    }
    return vectors;
}

winnow::DocumentCluster random_cluster(std::size_t n, std::size_t dim, std::uint64_t seed,
                                       const std::string& prefix) {
    const auto vectors = random_vectors(n, dim, seed);
    std::map<std::string, winnow::Embedding> members;
    for (std::size_t i = 0; i < n; ++i) members[prefix + std::to_string(i)] = vectors[i];
    return winnow::make_cluster(members);
}

void BM_KMeans(benchmark::State& state) {
    const auto vectors = random_vectors(static_cast<std::size_t>(state.range(0)), 16, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(winnow::kmeans_cluster(vectors, 10, 42));
    }
}
BENCHMARK(BM_KMeans)->Arg(50)->Arg(200)->Arg(1000);

void BM_EllipseMerge(benchmark::State& state) {
    const auto a = random_cluster(static_cast<std::size_t>(state.range(0)), 16, 1, "a");
    const auto b = random_cluster(static_cast<std::size_t>(state.range(0)), 16, 2, "b");
    for (auto _ : state) {
        benchmark::DoNotOptimize(winnow::ellipse_merge(a, b));
    }
}
BENCHMARK(BM_EllipseMerge)->Arg(25)->Arg(100);

void BM_HyperbolaMerge(benchmark::State& state) {
    const auto a = random_cluster(static_cast<std::size_t>(state.range(0)), 16, 3, "a");
    const auto b = random_cluster(static_cast<std::size_t>(state.range(0)), 16, 4, "b");
    for (auto _ : state) {
        benchmark::DoNotOptimize(winnow::hyperbola_merge(a, b));
    }
}
BENCHMARK(BM_HyperbolaMerge)->Arg(25)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
