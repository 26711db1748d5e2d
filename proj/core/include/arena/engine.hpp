#pragma once

#include "arena/map.hpp"
#include "arena/navdata.hpp"
#include "arena/navigator.hpp"
#include "arena/rules.hpp"
#include "arena/world.hpp"

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace arena {

class Engine;

/// Read-only, filtered view handed to controller hooks.
class Perception {
public:
    Perception(const Engine &engine, AgentId self) : engine_(&engine), self_(self) {}

    const Agent &self() const;
    Tick tick() const;
    const RulesConfig &rules() const;
    const Terrain &terrain() const;
    std::span<const Gate> gates() const;
    std::span<const Projectile> projectiles() const;
    std::span<const Crystal> crystals() const;
    const TeamStats &team_stats() const;

    /// Living teammates other than self, ascending id.
    std::vector<const Agent *> allies() const;
    /// Living enemies within min(range, sight range) and in clear line of
    /// sight, nearest first (ties by id).
    std::vector<const Agent *> visible_enemies(double range = std::numeric_limits<double>::infinity()) const;
    /// Standing enemy towers and base, always known.
    std::vector<const Agent *> enemy_structures() const;
    const Agent *own_base() const;
    const Agent *enemy_base() const;

    bool clear(Vec2 a, Vec2 b, double clearance) const;
    NavStatus nav_status() const { return self().nav_status; }
    std::optional<Vec2> nav_target() const;
    bool weapon_ready(WeaponSlot slot) const;
    bool dodge_ready() const;
    int weapon_damage(WeaponSlot slot) const;

private:
    const Engine *engine_;
    AgentId self_;
};

/// Callback handle for one agent. Calls are honoured only while the engine
/// is running that agent's controller; anything else is rejected and logged.
class AgentApi {
public:
    AgentApi(Engine &engine, AgentId id) : engine_(&engine), id_(id) {}

    AgentId id() const { return id_; }
    bool move_to(Vec2 p);
    bool stop();
    bool shoot(WeaponSlot slot);
    bool turn_to(double theta);
    bool face(Vec2 p);
    bool dodge(DodgeSide side = DodgeSide::Left);
    /// Per-agent random stream, independent of the engine's own.
    SplitMix64 &rng();

private:
    Engine *engine_;
    AgentId id_;
};

class Controller {
public:
    virtual ~Controller() = default;
    /// Before the first on_tick of each life.
    virtual void on_spawn(const Perception &, AgentApi &) {}
    virtual void on_tick(const Perception &view, AgentApi &api) = 0;
};

using ControllerFactory = std::function<std::unique_ptr<Controller>()>;

/// Which controllers and navigators a team fields. Minion, hero and gatherer
/// kinds without a factory are not fielded; towers fall back to the built-in
/// tower controller.
struct ControllerBundle {
    std::string name;
    std::map<AgentKind, ControllerFactory> controllers;
    std::map<AgentKind, std::string> navigators; ///< default "astar"
    std::map<AgentKind, std::string> controller_names;

    bool fields(AgentKind kind) const { return controllers.count(kind) != 0; }
    std::string navigator_for(AgentKind kind) const;
};

struct MatchResult {
    Outcome outcome = Outcome::Ongoing;
    std::optional<Team> winner;
    std::string reason;
    Tick final_tick = 0;
    std::vector<GameEvent> events;
    std::array<TeamStats, 2> stats{};
    int crystals_collected = 0;
    int crystals_total = 0;
    double wall_seconds = 0.0;
    friend bool operator==(const MatchResult &a, const MatchResult &b) {
        return a.outcome == b.outcome && a.winner == b.winner && a.reason == b.reason &&
               a.final_tick == b.final_tick && a.events == b.events && a.stats == b.stats &&
               a.crystals_collected == b.crystals_collected && a.crystals_total == b.crystals_total;
    }
};

struct EngineOptions {
    RulesConfig rules;
    std::uint64_t seed = 0;
    std::shared_ptr<const NavData> nav; ///< built from the map when null
};

class Engine {
public:
    Engine(const MapFile &map, ControllerBundle team_a, ControllerBundle team_b, EngineOptions options = {});
    Engine(const Engine &) = delete;
    Engine &operator=(const Engine &) = delete;

    /// Advance exactly one tick.
    void step();
    bool ended() const { return ended_; }
    /// Ends the match by the tick-limit rule if still running.
    void finish_at_limit();
    MatchResult result() const;

    const WorldState &world() const { return world_; }
    const RulesConfig &rules() const { return options_.rules; }
    const NavData &nav() const { return *nav_; }
    const MapFile &map() const { return map_; }
    std::uint64_t seed() const { return options_.seed; }

    // Scripting and test access.
    WorldState &mutable_world() { return world_; }
    /// Unit built from the rules table, facing the enemy base.
    Agent make_agent(AgentKind kind, Team team, Vec2 pos) const;
    AgentId add_agent(Agent agent, std::unique_ptr<Controller> controller = nullptr,
                      std::unique_ptr<Navigator> navigator = nullptr);
    Navigator *navigator(AgentId id);
    Controller *controller(AgentId id);
    NavContext nav_context(const Agent &agent);
    /// No agent slot is active outside step(); callbacks then get rejected.
    AgentId active_slot() const { return active_slot_; }

private:
    friend class AgentApi;
    friend class Perception;

    struct Command {
        enum class Kind { Move, Stop, Shoot, Turn, Dodge } kind;
        Vec2 point;
        double angle = 0.0;
        WeaponSlot slot = WeaponSlot::Primary;
        DodgeSide side = DodgeSide::Left;
    };

    struct Slot {
        std::unique_ptr<Controller> controller;
        std::unique_ptr<Navigator> navigator;
        SplitMix64 rng;
        bool started = false;
        bool turned = false;
        // Tentative per-hook state, reset for every hook invocation.
        std::vector<Command> pending;
        double pending_facing = 0.0;
        std::array<bool, 2> pending_shot{false, false};
        bool pending_dodge = false;
    };

    bool accept_call(AgentId id, const char *what);
    void log(GameEvent ev);
    void emit(EventKind kind, const Agent &a, AgentId other = kNoAgent, std::int64_t amount = 0, std::string detail = {});
    AgentId spawn(Agent agent, const ControllerBundle *bundle);
    void commit(Agent &agent, Slot &slot);

    void phase_gates();
    void phase_controllers();
    void phase_navigation();
    void phase_projectiles();
    void phase_rules();
    void phase_victory();
    void end_match(Outcome o, const std::string &reason);

    const ControllerBundle &bundle(Team t) const { return t == Team::B ? team_b_ : team_a_; }
    Vec2 minion_spawn_point(const Agent &base);

    MapFile map_;
    ControllerBundle team_a_;
    ControllerBundle team_b_;
    EngineOptions options_;
    std::shared_ptr<const NavData> nav_;
    WorldState world_;
    std::unordered_map<AgentId, Slot> slots_;
    std::vector<Segment> walls_;
    AgentId active_slot_ = kNoAgent;
    bool ended_ = false;
    Outcome outcome_ = Outcome::Ongoing;
    std::string reason_;
    std::unordered_map<AgentId, AgentId> last_hit_by_;
};

/// Builds an engine and steps it until the match ends or max_ticks elapse.
MatchResult run_headless(const MapFile &map, const ControllerBundle &team_a, const ControllerBundle &team_b,
                         std::uint64_t seed, Tick max_ticks, const RulesConfig &rules = {},
                         std::shared_ptr<const NavData> nav = nullptr);

/// Built-in tower behaviour: shoot the nearest visible enemy in range, leading it.
class TowerController final : public Controller {
public:
    void on_tick(const Perception &view, AgentApi &api) override;
};

/// Aim angle that intercepts a target moving at constant velocity, or the
/// direct bearing when no intercept exists.
double lead_angle(Vec2 shooter, Vec2 target, Vec2 target_velocity, double projectile_speed);

} // namespace arena
