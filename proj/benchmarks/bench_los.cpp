#include "arena/bsp.hpp"
#include "arena/map.hpp"
#include "arena/rng.hpp"

#include <benchmark/benchmark.h>

using namespace arena;

namespace {

// n x n lattice of small squares on a 200 x 200 field.
Terrain lattice(int n) {
    Terrain t;
    t.bounds = {0, 0, 200, 200};
    const double step = 200.0 / (n + 1);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) t.obstacles.push_back(rectangle({i * step - 1, j * step - 1, i * step + 1, j * step + 1}));
    }
    return t;
}

std::vector<std::pair<Vec2, Vec2>> queries(std::uint64_t seed, int n) {
    SplitMix64 rng(seed);
    std::vector<std::pair<Vec2, Vec2>> q;
    for (int i = 0; i < n; ++i) {
        q.push_back({{rng.uniform(0, 200), rng.uniform(0, 200)}, {rng.uniform(0, 200), rng.uniform(0, 200)}});
    }
    return q;
}

void BM_LosBrute(benchmark::State &state) {
    const LineOfSight los(lattice(static_cast<int>(state.range(0))), false);
    const auto q = queries(1, 1024);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto &[a, b] = q[i++ & 1023];
        benchmark::DoNotOptimize(los.clear(a, b, 0.5));
    }
    state.counters["edges"] = static_cast<double>(state.range(0) * state.range(0) * 4);
}

void BM_LosBsp(benchmark::State &state) {
    const LineOfSight los(lattice(static_cast<int>(state.range(0))), true);
    const auto q = queries(1, 1024);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto &[a, b] = q[i++ & 1023];
        benchmark::DoNotOptimize(los.clear(a, b, 0.5));
    }
    state.counters["edges"] = static_cast<double>(state.range(0) * state.range(0) * 4);
}

void BM_BspBuild(benchmark::State &state) {
    const Terrain t = lattice(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(BspTree::build(t));
}

} // namespace

BENCHMARK(BM_LosBrute)->Arg(4)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_LosBsp)->Arg(4)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_BspBuild)->Arg(8)->Arg(32);
