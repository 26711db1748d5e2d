#include "arena/apsp.hpp"
#include "arena/astar.hpp"
#include "arena/map.hpp"
#include "arena/navmesh.hpp"
#include "arena/rng.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace arena;

namespace {

const char *kMaps[] = {"arena", "gates", "crystals", "cup", "edge", "duel", "waypoints"};

MapFile map_arg(const benchmark::State &state) {
    return load_map(std::filesystem::path(ARENA_DATA_DIR) / "maps" / (std::string(kMaps[state.range(0)]) + ".json"));
}

void BM_Navmesh(benchmark::State &state) {
    const MapFile m = map_arg(state);
    state.SetLabel(m.name);
    for (auto _ : state) benchmark::DoNotOptimize(build_navmesh(m.terrain()));
}

void BM_Pathnodes(benchmark::State &state) {
    const MapFile m = map_arg(state);
    const LineOfSight los(m.terrain());
    const NavMesh mesh = build_navmesh(m.terrain());
    state.SetLabel(m.name);
    for (auto _ : state) benchmark::DoNotOptimize(place_pathnodes(mesh, m.terrain(), 1.0, &los));
}

void BM_FloydWarshall(benchmark::State &state) {
    const MapFile m = map_arg(state);
    const LineOfSight los(m.terrain());
    const PathNetwork net = place_pathnodes(build_navmesh(m.terrain()), m.terrain(), 1.0, &los);
    state.SetLabel(m.name + " n=" + std::to_string(net.size()));
    for (auto _ : state) benchmark::DoNotOptimize(floyd_warshall(net));
}

void BM_AStar(benchmark::State &state) {
    const MapFile m = map_arg(state);
    const LineOfSight los(m.terrain());
    const PathNetwork net = place_pathnodes(build_navmesh(m.terrain()), m.terrain(), 1.0, &los);
    SplitMix64 rng(3);
    const int n = static_cast<int>(net.size());
    state.SetLabel(m.name + " n=" + std::to_string(n));
    for (auto _ : state) {
        const int s = static_cast<int>(rng.below(n)), g = static_cast<int>(rng.below(n));
        benchmark::DoNotOptimize(astar(net, {}, s, g));
    }
}

} // namespace

BENCHMARK(BM_Navmesh)->DenseRange(0, 6);
BENCHMARK(BM_Pathnodes)->DenseRange(0, 6);
BENCHMARK(BM_FloydWarshall)->DenseRange(0, 6);
BENCHMARK(BM_AStar)->DenseRange(0, 6);
