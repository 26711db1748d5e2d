#pragma once

#include "arena/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

/// Raised when a map, rules file or similar input fails validation. `rule()`
/// is the machine-readable name of the failing check.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string rule, const std::string &message)
        : std::runtime_error(rule + ": " + message), rule_(std::move(rule)) {}
    const std::string &rule() const { return rule_; }

private:
    std::string rule_;
};

struct GateSpec {
    Segment segment;
    int period_ticks = 150;
    bool open = true;
    friend bool operator==(const GateSpec &, const GateSpec &) = default;
};

struct TeamLayout {
    Vec2 base;
    std::vector<Vec2> towers;
    std::optional<Vec2> hero_spawn;
    friend bool operator==(const TeamLayout &, const TeamLayout &) = default;
};

/// In-memory form of a map file.
///
/// JSON layout:
///   { "name": str,
///     "bounds": [min_x, min_y, max_x, max_y],
///     "obstacles": [ [[x,y], ...], ... ],
///     "gates": [ {"a": [x,y], "b": [x,y], "period": int, "open": bool} ],
///     "teams": { "A": {"base": [x,y], "towers": [[x,y]...], "hero": [x,y]}, "B": {...} },
///     "crystals": [[x,y], ...],
///     "gatherer": [x,y],
///     "waypoints": [[x,y], ...] }
/// Everything except "bounds" is optional.
struct MapFile {
    std::string name;
    Rect bounds;
    std::vector<Polygon> obstacles;
    std::vector<GateSpec> gates;
    std::optional<TeamLayout> team_a;
    std::optional<TeamLayout> team_b;
    std::vector<Vec2> crystals;
    std::optional<Vec2> gatherer_spawn;
    std::vector<Vec2> waypoints;

    Terrain terrain() const { return Terrain{bounds, obstacles}; }
    friend bool operator==(const MapFile &, const MapFile &) = default;
};

/// Parses and validates; obstacle vertex order is normalised to counter-clockwise.
MapFile parse_map(std::string_view json_text);
MapFile load_map(const std::filesystem::path &path);
std::string map_to_json(const MapFile &map);

/// FNV-1a over the canonical JSON form.
std::uint64_t map_hash(const MapFile &map);

/// Throws ValidationError naming the first failing rule.
void validate_map(const MapFile &map);

/// Interiors of two simple polygons overlap (touching is allowed).
bool polygons_overlap(const Polygon &a, const Polygon &b);

std::string read_text_file(const std::filesystem::path &path);

} // namespace arena
