#include "arena/navigator.hpp"

namespace arena {

void NavContext::emit(EventKind kind, std::string detail) const {
    if (!events) return;
    GameEvent ev;
    ev.tick = world.tick;
    ev.kind = kind;
    ev.agent = agent.id;
    ev.team = agent.team;
    ev.agent_kind = agent.kind;
    ev.position = agent.position;
    ev.detail = std::move(detail);
    events->push_back(std::move(ev));
}

long NavContext::gate_epoch() const {
    long sum = 0;
    for (const auto &g : world.gates) sum += g.toggles;
    return sum;
}

void DirectNavigator::set_target(const NavContext &, Vec2 target) { target_ = target; }

NavStep DirectNavigator::update(const NavContext &ctx) {
    if (!target_) return {NavStatus::Idle, ctx.agent.position};
    if (nearly_equal(ctx.agent.position, *target_)) return {NavStatus::Arrived, *target_};
    if (!ctx.clear(ctx.agent.position, *target_)) return {NavStatus::Stuck, ctx.agent.position};
    return {NavStatus::Moving, *target_};
}

std::vector<Vec2> DirectNavigator::remaining_path() const {
    if (!target_) return {};
    return {*target_};
}

} // namespace arena
