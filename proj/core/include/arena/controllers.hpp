#pragma once

#include "arena/btree.hpp"
#include "arena/engine.hpp"
#include "arena/fsm.hpp"

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace arena {

// ---- minion FSM -----------------------------------------------------------

struct MinionMemory {
    AgentId objective = kNoAgent;
    Vec2 objective_pos;
    Tick ordered = -1; ///< tick of the last move order
};

struct MinionCtx {
    const Perception &view;
    AgentApi &api;
    MinionMemory &mem;
};

/// Advance / Engage / Retarget. The state ids are public so tests can check them.
StateMachine<MinionCtx> make_minion_machine();

class MinionController final : public Controller {
public:
    MinionController();
    void on_spawn(const Perception &view, AgentApi &api) override;
    void on_tick(const Perception &view, AgentApi &api) override;
    const StateMachine<MinionCtx> &machine() const { return fsm_; }
    void set_trace(StateMachine<MinionCtx>::TraceSink sink) { fsm_.set_trace(std::move(sink)); }

private:
    StateMachine<MinionCtx> fsm_;
    MinionMemory mem_;
};

// ---- hero BT --------------------------------------------------------------

struct HeroMemory {
    int strafe_sign = 1;
    Tick strafe_until = 0;
    Tick last_dodge = -1000;
    int last_base_hp = -1;
    Tick base_hit_tick = -1000; ///< last tick our base lost hp
};

struct HeroCtx {
    HeroCtx(const Perception &v, AgentApi &a, HeroMemory &m) : view(v), mem(m), api_(&a) {}
    const Perception &view;
    HeroMemory &mem;
    /// Only actions may issue callbacks; conditions get a const context.
    AgentApi &api() { return *api_; }

private:
    AgentApi *api_;
};

/// Incoming enemy projectile on a collision course within `horizon` ticks.
const Projectile *incoming_threat(const Perception &view, double horizon_ticks = 10.0, double margin = 0.6);

BtNode<HeroCtx> make_hero_tree();

class HeroController final : public Controller {
public:
    HeroController();
    void on_spawn(const Perception &view, AgentApi &api) override;
    void on_tick(const Perception &view, AgentApi &api) override;
    BehaviorTree<HeroCtx> &tree() { return tree_; }

private:
    BehaviorTree<HeroCtx> tree_;
    HeroMemory mem_;
};

// ---- baselines and utilities ------------------------------------------------

/// Holds position and shoots whatever is in range, aiming straight.
class TurretHero final : public Controller {
public:
    void on_tick(const Perception &view, AgentApi &api) override;
};

/// Walks straight at the enemy hero (else base), firing whenever in range.
class RusherHero final : public Controller {
public:
    void on_tick(const Perception &view, AgentApi &api) override;
};

/// Keeps its distance with the long weapon, leads its shots and dodges.
class KiterHero final : public Controller {
public:
    void on_tick(const Perception &view, AgentApi &api) override;

private:
    Tick last_order_ = -1000;
};

/// Collects the nearest reachable crystal, switching targets when stuck.
class GathererController final : public Controller {
public:
    void on_tick(const Perception &view, AgentApi &api) override;

private:
    int current_ = -1;
    std::vector<Tick> avoid_until_;
};

class PassiveController final : public Controller {
public:
    void on_tick(const Perception &, AgentApi &) override {}
};

/// Throws from every on_tick from tick 1 on.
class CrashController final : public Controller {
public:
    void on_tick(const Perception &view, AgentApi &api) override;
};

// ---- human input ------------------------------------------------------------

struct PlayerCommand {
    enum class Kind { MoveTo, Shoot, Dodge, Stop };
    Kind kind = Kind::Stop;
    Vec2 point;                        ///< move target, or aim point for shoot
    bool has_point = false;
    WeaponSlot slot = WeaponSlot::Primary;
    DodgeSide side = DodgeSide::Left;
    Tick client_tick = -1;
};

/// Parses a {"type":"cmd", ...} frame; throws std::invalid_argument with a
/// message fit for an error frame.
PlayerCommand parse_player_command(std::string_view frame);

/// Thread-safe hand-off between a network session and the engine loop.
class HumanInput {
public:
    void push(const PlayerCommand &c);
    std::vector<PlayerCommand> drain();
    void set_connected(bool on);
    bool connected() const;
    std::int64_t dropped() const;
    void note_dropped(std::int64_t n);

private:
    mutable std::mutex mutex_;
    std::deque<PlayerCommand> queue_;
    bool connected_ = false;
    std::int64_t dropped_ = 0;
};

/// Applies queued commands at the tick boundary, at most one per kind per
/// tick; later duplicates wait for the following tick. Idles on disconnect.
class HumanController final : public Controller {
public:
    explicit HumanController(std::shared_ptr<HumanInput> input) : input_(std::move(input)) {}
    void on_tick(const Perception &view, AgentApi &api) override;

private:
    std::shared_ptr<HumanInput> input_;
    std::deque<PlayerCommand> backlog_;
    bool was_connected_ = false;
};

// ---- registry -----------------------------------------------------------------

/// Compiled-in factories by name: minion-fsm, hero-bt, turret, rusher, kiter,
/// gatherer, tower, passive, crash.
ControllerFactory controller_factory(const std::string &name);
bool known_controller(const std::string &name);
std::vector<std::string> controller_names();

} // namespace arena
