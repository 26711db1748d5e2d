#include "arena/engine.hpp"
#include "arena/harness.hpp"
#include "arena/map.hpp"
#include "arena/navdata.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace arena;

namespace {

std::filesystem::path data(const std::string &rel) { return std::filesystem::path(ARENA_DATA_DIR) / rel; }

ControllerBundle reference() { return load_bundle(data("bundles/reference.json")); }

void BM_ArenaStep(benchmark::State &state) {
    const MapFile m = load_map(data("maps/arena.json"));
    auto nav = std::make_shared<const NavData>(m);
    RulesConfig rules;
    rules.base.hp = rules.tower.hp = 1'000'000; // keep the match going
    const ControllerBundle b = reference();
    auto engine = std::make_unique<Engine>(m, b, b, EngineOptions{rules, 1, nav});
    std::size_t agents = 0, steps = 0;
    for (auto _ : state) {
        if (engine->world().tick >= 9000) {
            state.PauseTiming();
            engine = std::make_unique<Engine>(m, b, b, EngineOptions{rules, 1, nav});
            state.ResumeTiming();
        }
        engine->step();
        agents += engine->world().agents.size();
        ++steps;
    }
    state.counters["agents"] = static_cast<double>(agents) / static_cast<double>(steps);
    state.counters["x_realtime"] =
        benchmark::Counter(static_cast<double>(steps) * kTickSeconds, benchmark::Counter::kIsRate);
}

void BM_FullMatch(benchmark::State &state) {
    const MapFile m = load_map(data("maps/arena.json"));
    auto nav = std::make_shared<const NavData>(m);
    const ControllerBundle b = reference();
    Tick ticks = 0;
    for (auto _ : state) {
        const MatchResult r = run_headless(m, b, b, 7, 9000, {}, nav);
        ticks += r.final_tick;
    }
    state.counters["x_realtime"] =
        benchmark::Counter(static_cast<double>(ticks) * kTickSeconds, benchmark::Counter::kIsRate);
}

} // namespace

BENCHMARK(BM_ArenaStep);
BENCHMARK(BM_FullMatch)->Unit(benchmark::kMillisecond);
