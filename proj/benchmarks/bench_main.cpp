#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "unattack/evaluation.hpp"
#include "unattack/knn.hpp"
#include "unattack/optimizer.hpp"
#include "unattack/similarity.hpp"

using namespace unattack;

namespace {

RatingMatrix synthetic(int m, int n, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<Rating> entries;
    for (int u = 0; u < m; ++u) {
        bool any = false;
        for (int i = 0; i < n; ++i)
            if (coin(rng) < density) {
                entries.push_back({u, i, 1.0 + static_cast<double>(rng() % 5)});
                any = true;
            }
        if (!any) entries.push_back({u, static_cast<int>(rng() % n), 3.0});
    }
    return RatingMatrix(m, n, entries, {1.0, 5.0, 1.0});
}

void bm_sparse_cosine(benchmark::State& state) {
    const RatingMatrix m = synthetic(200, 500, 0.05, 1);
    std::size_t v = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparse_cosine(
            m.user_ratings(0), m.row_norm(0),
            m.user_ratings(static_cast<int>(v % 200)),
            m.row_norm(static_cast<int>(v % 200))));
        ++v;
    }
}
BENCHMARK(bm_sparse_cosine);

void bm_top_k_neighbors(benchmark::State& state) {
    const RatingMatrix m =
        synthetic(static_cast<int>(state.range(0)), 500, 0.05, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            top_k_neighbors(m, 0, 30, SimilarityKind::cosine));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_top_k_neighbors)->Range(100, 800)->Complexity();

void bm_recommend(benchmark::State& state) {
    const RatingMatrix m = synthetic(400, 500, 0.05, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            recommend(m, 0, 20, 30, SimilarityKind::cosine));
}
BENCHMARK(bm_recommend);

void bm_attack_gradient(benchmark::State& state) {
    const RatingMatrix m =
        synthetic(static_cast<int>(state.range(0)), 300, 0.05, 4);
    AttackConfig cfg;
    cfg.target_item = 7;
    cfg.k = 30;
    cfg.top_n = 20;
    cfg.fillers_z = 10;
    cfg.seed = 1;
    const ContinuousProfile x = initial_profile(m, 7, 1);
    const auto users = target_users(m, 7, kAllTargetUsers, 1);
    const AttackStructures structs = build_structures(m, x, cfg, users);
    for (auto _ : state)
        benchmark::DoNotOptimize(gradient_given(m, x, cfg, structs));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_attack_gradient)->Range(100, 400)->Complexity();

void bm_hit_ratio(benchmark::State& state) {
    const RatingMatrix m = synthetic(300, 400, 0.05, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            hit_ratio(m, 11, 20, 30, SimilarityKind::cosine));
}
BENCHMARK(bm_hit_ratio);

}  // namespace

BENCHMARK_MAIN();
