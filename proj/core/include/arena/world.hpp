#pragma once

#include "arena/geometry.hpp"
#include "arena/rng.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

using AgentId = std::int32_t;
using Tick = std::int64_t;
inline constexpr AgentId kNoAgent = -1;

/// Simulated seconds per tick.
inline constexpr double kTickSeconds = 1.0 / 30.0;
inline constexpr int kTicksPerSecond = 30;

enum class Team : std::uint8_t { A, B, Neutral };
enum class AgentKind : std::uint8_t { Minion, Hero, Tower, Base, Gatherer };
enum class WeaponSlot : std::uint8_t { Primary, Secondary };
enum class DodgeSide : std::uint8_t { Left, Right };
enum class NavStatus : std::uint8_t { Idle, Moving, Arrived, Stuck };

constexpr Team opponent(Team t) { return t == Team::A ? Team::B : (t == Team::B ? Team::A : Team::Neutral); }
constexpr int team_index(Team t) { return t == Team::A ? 0 : 1; }

std::string_view to_string(Team t);
std::string_view to_string(AgentKind k);
std::string_view to_string(NavStatus s);
std::optional<Team> team_from_string(std::string_view s);
std::optional<AgentKind> kind_from_string(std::string_view s);

struct Weapon {
    int damage = 0;
    double range = 0.0;
    int cooldown_ticks = 0;
    double projectile_speed = 1.0;
    friend bool operator==(const Weapon &, const Weapon &) = default;
};

struct Agent {
    AgentId id = kNoAgent;
    Team team = Team::Neutral;
    AgentKind kind = AgentKind::Minion;
    Vec2 position;
    double facing = 0.0; ///< radians
    Vec2 velocity;       ///< displacement during the last movement phase
    double radius = 1.0;
    int hp = 1;
    int max_hp = 1;
    double speed = 0.0; ///< world units per tick
    bool alive = true;

    std::array<std::optional<Weapon>, 2> weapons{};
    std::array<Tick, 2> weapon_ready_tick{0, 0};
    double dodge_distance = 0.0;
    int dodge_cooldown_ticks = 0;
    Tick dodge_ready_tick = 0;

    int level = 1;
    int kills = 0;
    Vec2 home;           ///< respawn point
    Tick respawn_tick = -1;
    Tick died_tick = -1;
    AgentId killed_by = kNoAgent;
    NavStatus nav_status = NavStatus::Idle;

    bool mobile() const { return speed > 0.0; }
    bool is_structure() const { return kind == AgentKind::Tower || kind == AgentKind::Base; }
    const std::optional<Weapon> &weapon(WeaponSlot s) const { return weapons[static_cast<int>(s)]; }
    Vec2 facing_dir() const;

    friend bool operator==(const Agent &, const Agent &) = default;
};

struct Gate {
    int id = 0;
    Segment segment;
    bool open = true;
    int toggle_period_ticks = 1;
    int phase = 0;             ///< initial offset drawn from the match RNG
    Tick next_toggle_tick = 0;
    int toggles = 0;           ///< number of state changes so far
    friend bool operator==(const Gate &, const Gate &) = default;
};

struct Projectile {
    std::int64_t id = 0;
    AgentId owner_id = kNoAgent;
    Team team = Team::Neutral;
    Vec2 position;
    Vec2 velocity; ///< world units per tick
    int damage = 1;
    double range_remaining = 0.0;
    friend bool operator==(const Projectile &, const Projectile &) = default;
};

struct Crystal {
    Vec2 position;
    bool collected = false;
    friend bool operator==(const Crystal &, const Crystal &) = default;
};

enum class EventKind : std::uint8_t {
    Spawn,
    Death,
    Damage,
    GateToggle,
    CrystalCollected,
    BaseDestroyed,
    MatchEnd,
    ControllerFault,
    RejectedCallback,
    Replan,
    Stuck,
    LevelUp,
    Respawn,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

/// One line of the event log. Fields unused by a kind keep their defaults.
struct GameEvent {
    Tick tick = 0;
    EventKind kind = EventKind::Spawn;
    AgentId agent = kNoAgent;   ///< subject
    AgentId other = kNoAgent;   ///< counterpart: attacker, killer
    std::int64_t amount = 0;    ///< damage, level, crystal index, gate id, winner code
    Team team = Team::Neutral;
    AgentKind agent_kind = AgentKind::Minion;
    Vec2 position;
    std::string detail;
    friend bool operator==(const GameEvent &, const GameEvent &) = default;
};

struct TeamStats {
    int kills = 0;
    int minions_spawned = 0;
    std::int64_t damage_dealt = 0;
    std::int64_t structure_damage_dealt = 0;
    std::int64_t structure_damage_taken = 0;
    friend bool operator==(const TeamStats &, const TeamStats &) = default;
};

/// Authoritative snapshot. Plain value: copying it yields an independent snapshot.
struct WorldState {
    Tick tick = 0;
    Terrain terrain;
    std::vector<Gate> gates;
    std::vector<Agent> agents; ///< ascending id
    std::vector<Projectile> projectiles;
    std::vector<Crystal> crystals;
    SplitMix64 rng;
    std::vector<GameEvent> event_log;
    std::array<TeamStats, 2> stats{};
    std::int64_t next_projectile_id = 0;
    AgentId next_agent_id = 0;

    const Agent *find(AgentId id) const;
    Agent *find(AgentId id);
    std::vector<Segment> closed_walls() const;
};

} // namespace arena
