#include "arena/frames.hpp"
#include "arena/harness.hpp"
#include "arena/navdata.hpp"
#include "arena/serve.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#ifndef ARENA_DATA_DIR
#define ARENA_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace arena;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kError = 2 };

fs::path data_dir() {
    if (const char *env = std::getenv("ARENA_DATA")) return env;
    return ARENA_DATA_DIR;
}

/// A path if it exists, else a shipped asset by name.
fs::path find_asset(const std::string &arg, const char *sub) {
    if (fs::exists(arg)) return arg;
    const fs::path p = data_dir() / sub / (arg + ".json");
    if (fs::exists(p)) return p;
    throw std::runtime_error(fmt::format("no such file or shipped {}: {}", sub, arg));
}

RulesConfig rules_arg(const std::string &path) {
    if (path.empty()) return {};
    return load_rules(find_asset(path, "rules"));
}

void print(const std::string &s) { std::cout << s << (s.empty() || s.back() != '\n' ? "\n" : ""); }

int cmd_run(const std::string &map_arg, const std::string &a, const std::string &b, std::uint64_t seed, Tick ticks,
            const std::string &rules, const std::string &replay, bool as_json) {
    const MapFile map = load_map(find_asset(map_arg, "maps"));
    const ControllerBundle ba = load_bundle(find_asset(a, "bundles"));
    const ControllerBundle bb = load_bundle(find_asset(b, "bundles"));
    const MatchResult r = run_headless(map, ba, bb, seed, ticks, rules_arg(rules));
    if (!replay.empty()) write_replay(replay, make_replay(map, seed, ba.name, bb.name, r));
    const double sim_seconds = static_cast<double>(r.final_tick) * kTickSeconds;
    if (as_json) {
        json j{{"map", map.name},
               {"seed", seed},
               {"team_a", ba.name},
               {"team_b", bb.name},
               {"outcome", outcome_name(r.outcome)},
               {"reason", r.reason},
               {"final_tick", r.final_tick},
               {"events", r.events.size()},
               {"stats", {stats_to_json(r.stats[0]), stats_to_json(r.stats[1])}},
               {"crystals", {r.crystals_collected, r.crystals_total}},
               {"wall_seconds", r.wall_seconds},
               {"realtime_multiplier", r.wall_seconds > 0 ? sim_seconds / r.wall_seconds : 0.0}};
        print(j.dump(2));
    } else {
        print(fmt::format("{} vs {} on {} seed {}: {} ({}) at tick {}", ba.name, bb.name, map.name, seed,
                          outcome_name(r.outcome), r.reason, r.final_tick));
        for (int t = 0; t < 2; ++t) {
            const auto &s = r.stats[t];
            print(fmt::format("  team {}: kills {} minions {} damage {} structure dealt {} taken {}", t == 0 ? "A" : "B",
                              s.kills, s.minions_spawned, s.damage_dealt, s.structure_damage_dealt,
                              s.structure_damage_taken));
        }
        if (r.crystals_total > 0) print(fmt::format("  crystals {}/{}", r.crystals_collected, r.crystals_total));
        print(fmt::format("  {:.3f} s wall, {:.0f}x real time", r.wall_seconds,
                          r.wall_seconds > 0 ? sim_seconds / r.wall_seconds : 0.0));
    }
    return kPass;
}

int cmd_grade(const std::string &scenario_arg, const std::string &bundle_arg, int threads, bool as_json) {
    const Scenario sc = load_scenario(find_asset(scenario_arg, "scenarios"));
    GradeReport r;
    try {
        r = grade(sc, load_bundle(find_asset(bundle_arg, "bundles")), threads);
    } catch (const std::exception &e) {
        r = grade_failure(sc, bundle_arg, e.what());
    }
    print(as_json ? report_to_json(r) : report_to_text(r));
    if (r.error) return kError;
    return r.passed() ? kPass : kFail;
}

int cmd_ladder(const std::string &map_arg, const std::vector<std::string> &names, int seeds, Tick ticks,
               const std::string &rules, int threads, bool as_json) {
    LadderConfig cfg;
    cfg.map = std::make_shared<const MapFile>(load_map(find_asset(map_arg, "maps")));
    cfg.rules = rules_arg(rules);
    cfg.max_ticks = ticks;
    for (int s = 1; s <= seeds; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    std::vector<ControllerBundle> bundles;
    for (const auto &n : names) bundles.push_back(load_bundle(find_asset(n, "bundles")));
    const LadderResult r = run_ladder(std::move(bundles), cfg, threads);
    print(as_json ? ladder_to_json(r) : ladder_to_text(r));
    return kPass;
}

int cmd_collect(const std::string &map_arg, const std::string &navigator, int seeds, Tick ticks, bool as_json) {
    const MapFile map = load_map(find_asset(map_arg, "maps"));
    if (!map.gatherer_spawn) throw std::runtime_error("map has no gatherer spawn");
    if (!NavData::known_navigator(navigator)) throw std::runtime_error("unknown navigator " + navigator);
    ControllerBundle b;
    b.name = "gatherer-" + navigator;
    b.controllers[AgentKind::Gatherer] = controller_factory("gatherer");
    b.navigators[AgentKind::Gatherer] = navigator;
    auto nav = std::make_shared<const NavData>(map);
    json rows = json::array();
    int complete = 0;
    for (int s = 1; s <= seeds; ++s) {
        const MatchResult r = run_headless(map, b, empty_bundle(), static_cast<std::uint64_t>(s), ticks, {}, nav);
        const bool all = r.crystals_total > 0 && r.crystals_collected == r.crystals_total;
        complete += all ? 1 : 0;
        int replans = 0;
        for (const auto &e : r.events) replans += e.kind == EventKind::Replan ? 1 : 0;
        rows.push_back({{"seed", s}, {"collected", r.crystals_collected}, {"total", r.crystals_total},
                        {"ticks", r.final_tick}, {"replans", replans}});
        if (!as_json) {
            print(fmt::format("seed {:>3}: {}/{} crystals in {} ticks, {} replans", s, r.crystals_collected,
                              r.crystals_total, r.final_tick, replans));
        }
    }
    if (as_json) print(json{{"map", map.name}, {"navigator", navigator}, {"runs", rows}, {"complete", complete}}.dump(2));
    else print(fmt::format("{}/{} runs collected every crystal", complete, seeds));
    return complete == seeds ? kPass : kFail;
}

int cmd_navmesh(const std::string &map_arg, const std::string &out, bool as_json) {
    const MapFile map = load_map(find_asset(map_arg, "maps"));
    const auto start = std::chrono::steady_clock::now();
    const NavMesh mesh = build_navmesh(map.terrain());
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    double total = 0.0;
    int convex = 0;
    for (const auto &c : mesh.cells) {
        total += area(c);
        convex += is_convex(c) ? 1 : 0;
    }
    if (!out.empty()) std::ofstream(out) << navmesh_to_json(mesh);
    if (as_json) {
        print(navmesh_to_json(mesh));
    } else {
        print(fmt::format("{}: {} cells ({} convex), {} adjacencies, area {:.3f}, built in {:.2f} ms", map.name,
                          mesh.cells.size(), convex, mesh.adjacency.size(), total, ms));
    }
    return convex == static_cast<int>(mesh.cells.size()) ? kPass : kFail;
}

int cmd_pathnet(const std::string &map_arg, double clearance, const std::string &out, bool as_json) {
    const MapFile map = load_map(find_asset(map_arg, "maps"));
    const NavData nav(map);
    const NavLayer &layer = nav.layer(clearance);
    const std::string text = network_to_json(*layer.net, clearance);
    if (!out.empty()) std::ofstream(out) << text;
    if (as_json) print(text);
    else print(fmt::format("{}: {} waypoints, {} arcs at clearance {}", map.name, layer.net->size(), layer.net->arcs().size(), clearance));
    return kPass;
}

int cmd_apsp(const std::string &map_arg, double clearance, const std::string &out, bool as_json) {
    const MapFile map = load_map(find_asset(map_arg, "maps"));
    const NavData nav(map);
    const NavLayer &layer = nav.layer(clearance);
    const SuccessorTable &t = *layer.table;
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        write_table(t, f);
    }
    int reachable = 0;
    double longest = 0.0;
    for (int i = 0; i < t.n; ++i) {
        for (int j = 0; j < t.n; ++j) {
            if (i != j && t.reachable(i, j)) {
                ++reachable;
                longest = std::max(longest, t.distance(i, j));
            }
        }
    }
    if (as_json) {
        print(json{{"map", map.name}, {"nodes", t.n}, {"reachable_pairs", reachable}, {"longest", longest}}.dump(2));
    } else {
        print(fmt::format("{}: {} nodes, {} reachable ordered pairs, longest shortest path {:.3f}", map.name, t.n,
                          reachable, longest));
    }
    return kPass;
}

int cmd_grid(const std::string &map_arg, double cell, bool as_json) {
    const MapFile map = load_map(find_asset(map_arg, "maps"));
    const NavGrid g = build_navgrid(map.terrain(), cell);
    if (as_json) {
        print(navgrid_to_json(g));
        return kPass;
    }
    print(fmt::format("{}: {}x{} cells of {}, {} traversable", map.name, g.cols, g.rows, cell, g.traversable_count()));
    for (int r = g.rows - 1; r >= 0; --r) {
        std::string line;
        for (int c = 0; c < g.cols; ++c) line += g.at(c, r) ? '.' : '#';
        print(line);
    }
    return kPass;
}

int cmd_bench_los(const std::string &map_arg, int queries, double clearance, bool as_json) {
    const MapFile map = load_map(find_asset(map_arg, "maps"));
    const Terrain terrain = map.terrain();
    const LineOfSight brute(terrain, false);
    const LineOfSight fast(terrain, true);
    std::mt19937_64 rng(7);
    const Rect &b = terrain.bounds;
    std::uniform_real_distribution<double> ux(b.min_x, b.max_x), uy(b.min_y, b.max_y);
    std::vector<std::pair<Vec2, Vec2>> qs;
    for (int i = 0; i < queries; ++i) qs.push_back({{ux(rng), uy(rng)}, {ux(rng), uy(rng)}});

    auto time_it = [&](const LineOfSight &los, int &clear) {
        clear = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto &[p, q] : qs) clear += los.clear(p, q, clearance, {}) ? 1 : 0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    int clear_brute = 0, clear_fast = 0;
    const double tb = time_it(brute, clear_brute);
    const double tf = time_it(fast, clear_fast);
    int mismatches = 0;
    BspStats stats;
    for (const auto &[p, q] : qs) {
        mismatches += brute.clear(p, q, clearance, {}) != fast.bsp()->clear_line(p, q, clearance, {}, &stats) ? 1 : 0;
    }
    std::size_t edges = 0;
    for (const auto &o : terrain.obstacles) edges += o.size();
    const double mean_edges = queries ? static_cast<double>(stats.edges_tested) / queries : 0.0;
    const double mean_leaves = queries ? static_cast<double>(stats.leaves_visited) / queries : 0.0;
    if (as_json) {
        print(json{{"map", map.name},
                   {"queries", queries},
                   {"brute_qps", queries / tb},
                   {"bsp_qps", queries / tf},
                   {"mismatches", mismatches},
                   {"total_edges", edges},
                   {"mean_edges_tested", mean_edges},
                   {"mean_leaves_visited", mean_leaves},
                   {"leaves", fast.bsp()->leaf_count()}}
                  .dump(2));
    } else {
        print(fmt::format("{}: {} queries, brute {:.0f}/s, bsp {:.0f}/s ({:.2f}x)", map.name, queries, queries / tb,
                          queries / tf, tb / tf));
        print(fmt::format("  {} edges, {} leaves; per query {:.2f} edges tested, {:.2f} leaves visited; {} mismatches",
                          edges, fast.bsp()->leaf_count(), mean_edges, mean_leaves, mismatches));
    }
    return mismatches == 0 ? kPass : kFail;
}

int cmd_bt_trace(const std::string &tree_path, int ticks, bool reactive) {
    ScriptedTree t = scripted_tree_from_json(read_text_file(tree_path));
    const auto trace = run_scripted(std::move(t), ticks, BtOptions{reactive});
    std::cout << trace_to_jsonl(trace);
    return kPass;
}

int cmd_replay(const std::string &path, const std::string &map_arg, bool as_json) {
    std::optional<std::uint64_t> hash;
    if (!map_arg.empty()) hash = map_hash(load_map(find_asset(map_arg, "maps")));
    const Replay r = load_replay(path, hash);
    if (as_json) {
        print(json{{"engine_version", r.engine_version},
                   {"map", r.map_name},
                   {"seed", r.seed},
                   {"team_a", r.team_a},
                   {"team_b", r.team_b},
                   {"outcome", outcome_name(r.result.outcome)},
                   {"reason", r.result.reason},
                   {"final_tick", r.result.final_tick},
                   {"events", r.result.events.size()}}
                  .dump(2));
    } else {
        print(fmt::format("{} vs {} on {} seed {}: {} ({}) at tick {}, {} events", r.team_a, r.team_b, r.map_name,
                          r.seed, outcome_name(r.result.outcome), r.result.reason, r.result.final_tick,
                          r.result.events.size()));
    }
    return kPass;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"arena: headless 2D MOBA engine, autograder and ladder"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Machine-readable output");

    std::string map = "arena", a = "reference", b = "do-nothing", rules, replay, out, navigator = "astar";
    std::uint64_t seed = 1;
    Tick ticks = 9000;
    int threads = 0, seeds = 10, queries = 10000;
    double clearance = 1.0, cell = 2.0;

    auto *run = app.add_subcommand("run", "Run one headless match");
    run->add_option("--map", map, "Map file or shipped map name");
    run->add_option("--a", a, "Team A bundle");
    run->add_option("--b", b, "Team B bundle");
    run->add_option("--seed", seed);
    run->add_option("--ticks", ticks, "Tick limit");
    run->add_option("--rules", rules, "Rules override file");
    run->add_option("--replay", replay, "Write a JSON-lines replay here");

    std::string scenario, bundle = "reference";
    auto *grade_cmd = app.add_subcommand("grade", "Grade a bundle against a scenario");
    grade_cmd->add_option("scenario", scenario, "Scenario file or shipped scenario id")->required();
    grade_cmd->add_option("bundle", bundle, "Bundle file or shipped bundle name");
    grade_cmd->add_option("--threads", threads);

    std::vector<std::string> names;
    auto *ladder = app.add_subcommand("ladder", "Round-robin ladder between bundles");
    ladder->add_option("bundles", names, "Two or more bundles")->required()->expected(2, -1);
    ladder->add_option("--map", map);
    ladder->add_option("--seeds", seeds, "Seeds per ordered pairing");
    ladder->add_option("--ticks", ticks);
    ladder->add_option("--rules", rules);
    ladder->add_option("--threads", threads);

    auto *collect = app.add_subcommand("collect", "Crystal-collection runs with the reference gatherer");
    collect->add_option("--map", map);
    collect->add_option("--navigator", navigator, "direct | grid | apsp | astar | astar-smooth");
    collect->add_option("--seeds", seeds);
    collect->add_option("--ticks", ticks);

    auto *navmesh = app.add_subcommand("navmesh", "Build and summarise the navigation mesh");
    navmesh->add_option("--map", map);
    navmesh->add_option("--out", out, "Write cells as JSON");

    auto *pathnet = app.add_subcommand("pathnet", "Build the pathnode network");
    pathnet->add_option("--map", map);
    pathnet->add_option("--clearance", clearance);
    pathnet->add_option("--out", out);

    auto *apsp = app.add_subcommand("apsp", "All-pairs shortest paths over the pathnode network");
    apsp->add_option("--map", map);
    apsp->add_option("--clearance", clearance);
    apsp->add_option("--out", out, "Write the binary successor table");

    auto *grid = app.add_subcommand("grid", "Traversability grid");
    grid->add_option("--map", map);
    grid->add_option("--cell", cell);

    auto *bench = app.add_subcommand("bench-los", "Brute force vs BSP line-of-sight throughput");
    bench->add_option("--map", map);
    bench->add_option("--queries", queries);
    bench->add_option("--clearance", clearance);

    std::string tree;
    bool reactive = false;
    auto *bt = app.add_subcommand("bt-trace", "Run a scripted behaviour tree and print its trace");
    bt->add_option("tree", tree)->required();
    bt->add_option("--ticks", ticks);
    bt->add_flag("--reactive", reactive);

    std::string replay_path;
    auto *replay_cmd = app.add_subcommand("replay", "Validate and summarise a replay file");
    replay_cmd->add_option("file", replay_path)->required();
    replay_cmd->add_option("--map", out, "Check the replay against this map");

    ServeOptions so;
    std::string opponent = "reference-hero";
    auto *serve = app.add_subcommand("serve", "Host a live session: a human plays team A's hero");
    serve->add_option("--map", map);
    serve->add_option("--opponent", opponent, "Team B bundle");
    serve->add_option("--port", so.port);
    serve->add_option("--seed", seed);
    serve->add_option("--ticks", ticks);
    serve->add_option("--rules", rules);
    serve->add_option("--static", so.static_dir, "Directory served over HTTP");
    serve->add_option("--duration", so.max_seconds, "Stop after this many seconds (0 = until match end)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(map, a, b, seed, ticks, rules, replay, as_json);
        if (*grade_cmd) return cmd_grade(scenario, bundle, threads, as_json);
        if (*ladder) return cmd_ladder(map, names, seeds, ticks, rules, threads, as_json);
        if (*collect) return cmd_collect(map, navigator, seeds, ticks, as_json);
        if (*navmesh) return cmd_navmesh(map, out, as_json);
        if (*pathnet) return cmd_pathnet(map, clearance, out, as_json);
        if (*apsp) return cmd_apsp(map, clearance, out, as_json);
        if (*grid) return cmd_grid(map, cell, as_json);
        if (*bench) return cmd_bench_los(map, queries, clearance, as_json);
        if (*bt) return cmd_bt_trace(tree, static_cast<int>(ticks == 9000 ? 10 : ticks), reactive);
        if (*replay_cmd) return cmd_replay(replay_path, out, as_json);
        if (*serve) {
            so.map = load_map(find_asset(map, "maps"));
            so.opponent = load_bundle(find_asset(opponent, "bundles"));
            so.rules = rules_arg(rules);
            so.seed = seed;
            so.max_ticks = ticks;
            if (so.static_dir.empty()) so.static_dir = (data_dir() / ".." / "ui").string();
            return run_serve(so) ? kPass : kError;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
