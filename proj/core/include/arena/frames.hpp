#pragma once

#include "arena/engine.hpp"

#include <string>

namespace arena {

/// {"type":"state", "tick", "bounds", "entities", "gates", "projectiles",
///  "crystals", "events"} built from the world alone. `events_since` selects
/// the events with tick >= it.
std::string state_frame(const WorldState &world, Tick events_since, AgentId human = kNoAgent);
/// Same, plus each navigating agent's current target as "target": [x, y].
std::string state_frame(Engine &engine, Tick events_since, AgentId human = kNoAgent);

/// {"type":"end", "winner": "A" | "B" | null, "outcome", "reason", "tick"}
std::string end_frame(const MatchResult &result);

/// {"type":"error", "message"}
std::string error_frame(const std::string &message);

/// Static map geometry for clients: {"type":"map", "bounds", "obstacles", "gates"}
std::string map_frame(const MapFile &map);

} // namespace arena
