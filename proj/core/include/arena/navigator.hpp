#pragma once

#include "arena/bsp.hpp"
#include "arena/world.hpp"

#include <optional>
#include <span>
#include <vector>

namespace arena {

/// What a navigator sees during its update: the world (read-only), its own
/// agent, static line of sight, and the currently closed gates.
struct NavContext {
    const WorldState &world;
    const Agent &agent;
    const LineOfSight &los;
    std::span<const Segment> walls;
    std::vector<GameEvent> *events = nullptr;

    bool clear(Vec2 a, Vec2 b, double clearance) const { return los.clear(a, b, clearance, walls); }
    bool clear(Vec2 a, Vec2 b) const { return clear(a, b, agent.radius); }
    void emit(EventKind kind, std::string detail = {}) const;
    /// Sum of gate toggle counters; changes whenever any gate changes state.
    long gate_epoch() const;
};

struct NavStep {
    NavStatus status = NavStatus::Idle;
    Vec2 next; ///< point to walk toward this tick (valid when Moving)
};

/// Turns a target position into straight-line legs. The engine calls
/// update() once per tick and walks the agent toward `next`.
class Navigator {
public:
    virtual ~Navigator() = default;
    virtual void set_target(const NavContext &ctx, Vec2 target) = 0;
    virtual void clear_target() = 0;
    virtual NavStep update(const NavContext &ctx) = 0;
    virtual std::optional<Vec2> target() const = 0;
    /// Remaining leg endpoints, for debugging and the client view.
    virtual std::vector<Vec2> remaining_path() const { return {}; }
};

/// Walks straight at the target; reports Stuck when the line is blocked.
class DirectNavigator final : public Navigator {
public:
    void set_target(const NavContext &ctx, Vec2 target) override;
    void clear_target() override { target_.reset(); }
    NavStep update(const NavContext &ctx) override;
    std::optional<Vec2> target() const override { return target_; }
    std::vector<Vec2> remaining_path() const override;

private:
    std::optional<Vec2> target_;
};

} // namespace arena
