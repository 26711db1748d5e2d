#include "arena/world.hpp"

#include <algorithm>
#include <cmath>

namespace arena {

namespace {

constexpr std::array<std::string_view, 13> kEventNames{
    "spawn",      "death",   "damage", "gate_toggle", "crystal_collected", "base_destroyed", "match_end",
    "controller_fault", "rejected_callback", "replan", "stuck", "level_up", "respawn"};

constexpr std::array<std::string_view, 5> kKindNames{"minion", "hero", "tower", "base", "gatherer"};
constexpr std::array<std::string_view, 3> kTeamNames{"A", "B", "neutral"};

} // namespace

std::string_view to_string(Team t) { return kTeamNames[static_cast<int>(t)]; }
std::string_view to_string(AgentKind k) { return kKindNames[static_cast<int>(k)]; }
std::string_view to_string(EventKind k) { return kEventNames[static_cast<int>(k)]; }

std::string_view to_string(NavStatus s) {
    switch (s) {
    case NavStatus::Idle: return "idle";
    case NavStatus::Moving: return "moving";
    case NavStatus::Arrived: return "arrived";
    case NavStatus::Stuck: return "stuck";
    }
    return "idle";
}

std::optional<Team> team_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kTeamNames.size(); ++i) {
        if (kTeamNames[i] == s) return static_cast<Team>(i);
    }
    return std::nullopt;
}

std::optional<AgentKind> kind_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == s) return static_cast<AgentKind>(i);
    }
    return std::nullopt;
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kEventNames.size(); ++i) {
        if (kEventNames[i] == s) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

Vec2 Agent::facing_dir() const { return {std::cos(facing), std::sin(facing)}; }

const Agent *WorldState::find(AgentId id) const {
    auto it = std::lower_bound(agents.begin(), agents.end(), id,
                               [](const Agent &a, AgentId v) { return a.id < v; });
    return (it != agents.end() && it->id == id) ? &*it : nullptr;
}

Agent *WorldState::find(AgentId id) {
    return const_cast<Agent *>(static_cast<const WorldState &>(*this).find(id));
}

std::vector<Segment> WorldState::closed_walls() const {
    std::vector<Segment> walls;
    for (const auto &g : gates) {
        if (!g.open) walls.push_back(g.segment);
    }
    return walls;
}

} // namespace arena
