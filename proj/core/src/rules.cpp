#include "arena/rules.hpp"

#include "arena/map.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace arena {

using nlohmann::json;

namespace {

void read_weapon(const json &j, const char *key, std::optional<Weapon> &w) {
    if (!j.contains(key)) return;
    if (j[key].is_null()) {
        w.reset();
        return;
    }
    Weapon out = w.value_or(Weapon{});
    const auto &o = j[key];
    out.damage = o.value("damage", out.damage);
    out.range = o.value("range", out.range);
    out.cooldown_ticks = o.value("cooldown_ticks", out.cooldown_ticks);
    out.projectile_speed = o.value("projectile_speed", out.projectile_speed);
    if (out.damage <= 0 || out.range <= 0.0 || out.cooldown_ticks < 0 || out.projectile_speed <= 0.0) {
        throw ValidationError("rules.weapon", std::string(key) + " must have positive damage, range and speed");
    }
    w = out;
}

void read_unit(const json &j, const char *key, UnitSpec &u) {
    if (!j.contains(key)) return;
    const auto &o = j[key];
    u.hp = o.value("hp", u.hp);
    u.radius = o.value("radius", u.radius);
    u.speed = o.value("speed", u.speed);
    read_weapon(o, "weapon1", u.weapon1);
    read_weapon(o, "weapon2", u.weapon2);
    if (u.hp <= 0 || u.radius <= 0.0 || u.speed < 0.0) {
        throw ValidationError("rules.unit", std::string(key) + " needs positive hp and radius");
    }
}

json weapon_json(const std::optional<Weapon> &w) {
    if (!w) return nullptr;
    return {{"damage", w->damage},
            {"range", w->range},
            {"cooldown_ticks", w->cooldown_ticks},
            {"projectile_speed", w->projectile_speed}};
}

json unit_json(const UnitSpec &u) {
    return {{"hp", u.hp},
            {"radius", u.radius},
            {"speed", u.speed},
            {"weapon1", weapon_json(u.weapon1)},
            {"weapon2", weapon_json(u.weapon2)}};
}

} // namespace

RulesConfig parse_rules(std::string_view json_text, RulesConfig r) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ValidationError("schema.json", e.what());
    }
    if (!j.is_object()) throw ValidationError("schema.object", "rules must be a JSON object");
    try {
        r.spawn_period_ticks = j.value("spawn_period_ticks", r.spawn_period_ticks);
        read_unit(j, "minion", r.minion);
        read_unit(j, "tower", r.tower);
        read_unit(j, "base", r.base);
        read_unit(j, "hero", r.hero);
        read_unit(j, "gatherer", r.gatherer);
        r.dodge_distance = j.value("dodge_distance", r.dodge_distance);
        r.dodge_cooldown_ticks = j.value("dodge_cooldown_ticks", r.dodge_cooldown_ticks);
        r.respawn_ticks = j.value("respawn_ticks", r.respawn_ticks);
        r.level_damage_bonus = j.value("level_damage_bonus", r.level_damage_bonus);
        r.level_hp_bonus = j.value("level_hp_bonus", r.level_hp_bonus);
        r.max_level = j.value("max_level", r.max_level);
        r.sight_range = j.value("sight_range", r.sight_range);
        r.crystal_radius = j.value("crystal_radius", r.crystal_radius);
        r.spawn_minions = j.value("spawn_minions", r.spawn_minions);
        r.spawn_heroes = j.value("spawn_heroes", r.spawn_heroes);
    } catch (const json::type_error &e) {
        throw ValidationError("schema.type", e.what());
    }
    if (r.spawn_period_ticks <= 0) throw ValidationError("rules.spawn_period", "spawn_period_ticks must be positive");
    if (r.respawn_ticks < 0) throw ValidationError("rules.respawn", "respawn_ticks must be non-negative");
    if (r.max_level < 1) throw ValidationError("rules.max_level", "max_level must be at least 1");
    return r;
}

RulesConfig load_rules(const std::filesystem::path &path) { return parse_rules(read_text_file(path)); }

std::string rules_to_json(const RulesConfig &r) {
    json j{{"spawn_period_ticks", r.spawn_period_ticks},
           {"minion", unit_json(r.minion)},
           {"tower", unit_json(r.tower)},
           {"base", unit_json(r.base)},
           {"hero", unit_json(r.hero)},
           {"gatherer", unit_json(r.gatherer)},
           {"dodge_distance", r.dodge_distance},
           {"dodge_cooldown_ticks", r.dodge_cooldown_ticks},
           {"respawn_ticks", r.respawn_ticks},
           {"level_damage_bonus", r.level_damage_bonus},
           {"level_hp_bonus", r.level_hp_bonus},
           {"max_level", r.max_level},
           {"sight_range", r.sight_range},
           {"crystal_radius", r.crystal_radius},
           {"spawn_minions", r.spawn_minions},
           {"spawn_heroes", r.spawn_heroes}};
    return j.dump(2);
}

int scaled_damage(int base_damage, int level, const RulesConfig &rules) {
    const double f = 1.0 + rules.level_damage_bonus * (std::max(level, 1) - 1);
    return std::max(1, static_cast<int>(std::lround(base_damage * f)));
}

Outcome victory_check(const WorldState &world, bool at_tick_limit) {
    bool destroyed[2] = {false, false};
    bool present[2] = {false, false};
    for (const auto &a : world.agents) {
        if (a.kind != AgentKind::Base || a.team == Team::Neutral) continue;
        present[team_index(a.team)] = true;
        if (!a.alive || a.hp == 0) destroyed[team_index(a.team)] = true;
    }
    if (destroyed[0] != destroyed[1]) return destroyed[0] ? Outcome::WinnerB : Outcome::WinnerA;
    if (destroyed[0] && destroyed[1]) return Outcome::Draw;
    if (!at_tick_limit) return Outcome::Ongoing;
    if (!present[0] && !present[1]) return Outcome::Draw;
    const auto ta = world.stats[0].structure_damage_taken;
    const auto tb = world.stats[1].structure_damage_taken;
    if (ta < tb) return Outcome::WinnerA;
    if (tb < ta) return Outcome::WinnerB;
    return Outcome::Draw;
}

std::optional<Team> outcome_winner(Outcome o) {
    if (o == Outcome::WinnerA) return Team::A;
    if (o == Outcome::WinnerB) return Team::B;
    return std::nullopt;
}

} // namespace arena
