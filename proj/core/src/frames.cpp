#include "arena/frames.hpp"

#include "arena/replay.hpp"

#include <nlohmann/json.hpp>

namespace arena {

using nlohmann::json;

namespace {

json pt(Vec2 p) { return json::array({p.x, p.y}); }

json state_json(const WorldState &world, Tick events_since, AgentId human) {
    json entities = json::array();
    for (const auto &a : world.agents) {
        json e{{"id", a.id},
               {"kind", to_string(a.kind)},
               {"team", to_string(a.team)},
               {"x", a.position.x},
               {"y", a.position.y},
               {"facing", a.facing},
               {"radius", a.radius},
               {"hp", a.hp},
               {"max_hp", a.max_hp},
               {"hp_frac", a.max_hp > 0 ? static_cast<double>(a.hp) / a.max_hp : 0.0},
               {"level", a.level},
               {"alive", a.alive},
               {"nav", to_string(a.nav_status)}};
        if (a.kind == AgentKind::Hero) {
            e["cooldowns"] = {std::max<Tick>(0, a.weapon_ready_tick[0] - world.tick),
                              std::max<Tick>(0, a.weapon_ready_tick[1] - world.tick),
                              std::max<Tick>(0, a.dodge_ready_tick - world.tick)};
            if (a.respawn_tick >= 0) e["respawn_tick"] = a.respawn_tick;
        }
        if (a.id == human) e["human"] = true;
        entities.push_back(std::move(e));
    }
    json gates = json::array();
    for (const auto &g : world.gates) {
        gates.push_back({{"id", g.id}, {"a", pt(g.segment.a)}, {"b", pt(g.segment.b)}, {"open", g.open}});
    }
    json projectiles = json::array();
    for (const auto &p : world.projectiles) {
        projectiles.push_back({{"id", p.id},
                               {"team", to_string(p.team)},
                               {"x", p.position.x},
                               {"y", p.position.y},
                               {"vx", p.velocity.x},
                               {"vy", p.velocity.y}});
    }
    json crystals = json::array();
    for (const auto &c : world.crystals) {
        crystals.push_back({{"x", c.position.x}, {"y", c.position.y}, {"collected", c.collected}});
    }
    json events = json::array();
    for (auto it = world.event_log.rbegin(); it != world.event_log.rend() && it->tick >= events_since; ++it) {
        events.push_back(event_to_json(*it));
    }
    std::reverse(events.begin(), events.end());
    const Rect &b = world.terrain.bounds;
    json f{{"type", "state"},
           {"tick", world.tick},
           {"bounds", {b.min_x, b.min_y, b.max_x, b.max_y}},
           {"entities", std::move(entities)},
           {"gates", std::move(gates)},
           {"projectiles", std::move(projectiles)},
           {"crystals", std::move(crystals)},
           {"stats", json::array({stats_to_json(world.stats[0]), stats_to_json(world.stats[1])})},
           {"events", std::move(events)}};
    return f;
}

} // namespace

std::string state_frame(const WorldState &world, Tick events_since, AgentId human) {
    return state_json(world, events_since, human).dump();
}

std::string state_frame(Engine &engine, Tick events_since, AgentId human) {
    json f = state_json(engine.world(), events_since, human);
    for (auto &e : f["entities"]) {
        const Navigator *nav = engine.navigator(e["id"].get<AgentId>());
        if (!nav) continue;
        if (auto t = nav->target()) e["target"] = pt(*t);
    }
    return f.dump();
}

std::string end_frame(const MatchResult &result) {
    json f{{"type", "end"},
           {"winner", nullptr},
           {"outcome", outcome_name(result.outcome)},
           {"reason", result.reason},
           {"tick", result.final_tick}};
    if (result.winner) f["winner"] = to_string(*result.winner);
    return f.dump();
}

std::string error_frame(const std::string &message) { return json{{"type", "error"}, {"message", message}}.dump(); }

std::string map_frame(const MapFile &map) {
    json obstacles = json::array();
    for (const auto &poly : map.obstacles) {
        json ring = json::array();
        for (auto v : poly.vertices) ring.push_back(pt(v));
        obstacles.push_back(std::move(ring));
    }
    json gates = json::array();
    for (const auto &g : map.gates) gates.push_back({{"a", pt(g.segment.a)}, {"b", pt(g.segment.b)}});
    const Rect &b = map.bounds;
    return json{{"type", "map"},
                {"name", map.name},
                {"bounds", {b.min_x, b.min_y, b.max_x, b.max_y}},
                {"obstacles", std::move(obstacles)},
                {"gates", std::move(gates)}}
        .dump();
}

} // namespace arena
