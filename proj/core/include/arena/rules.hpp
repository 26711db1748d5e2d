#pragma once

#include "arena/world.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace arena {

struct UnitSpec {
    int hp = 1;
    double radius = 1.0;
    double speed = 0.0; ///< world units per tick
    std::optional<Weapon> weapon1;
    std::optional<Weapon> weapon2;
    friend bool operator==(const UnitSpec &, const UnitSpec &) = default;
};

/// Numeric rule table. Every value is an engine calibration; a rules JSON
/// file may override any subset using the same field names.
struct RulesConfig {
    int spawn_period_ticks = 120;
    UnitSpec minion{40, 1.0, 1.2, Weapon{5, 6.0, 15, 2.0}, std::nullopt};
    UnitSpec tower{300, 2.0, 0.0, Weapon{10, 12.0, 30, 3.0}, std::nullopt};
    UnitSpec base{500, 3.0, 0.0, std::nullopt, std::nullopt};
    UnitSpec hero{120, 1.5, 1.4, Weapon{20, 4.0, 30, 2.0}, Weapon{8, 14.0, 15, 2.5}};
    UnitSpec gatherer{100, 1.0, 1.0, std::nullopt, std::nullopt};
    double dodge_distance = 5.0;
    int dodge_cooldown_ticks = 90;
    int respawn_ticks = 300;
    double level_damage_bonus = 0.10; ///< fraction of base damage per level above 1
    int level_hp_bonus = 10;
    int max_level = 10;
    double sight_range = 40.0;
    double crystal_radius = 1.0;
    bool spawn_minions = true;
    bool spawn_heroes = true;
    friend bool operator==(const RulesConfig &, const RulesConfig &) = default;
};

/// Overrides defaults with the fields present in `json_text`.
RulesConfig parse_rules(std::string_view json_text, RulesConfig base = {});
RulesConfig load_rules(const std::filesystem::path &path);
std::string rules_to_json(const RulesConfig &rules);

/// Weapon damage at a hero level, rounded to the nearest integer.
int scaled_damage(int base_damage, int level, const RulesConfig &rules);

enum class Outcome : std::uint8_t { Ongoing, WinnerA, WinnerB, Draw };

/// Winner iff exactly one base is destroyed. At the tick limit with both
/// standing, the team whose structures took less damage wins.
Outcome victory_check(const WorldState &world, bool at_tick_limit);

std::optional<Team> outcome_winner(Outcome o);

} // namespace arena
