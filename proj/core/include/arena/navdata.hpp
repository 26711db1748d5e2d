#pragma once

#include "arena/apsp.hpp"
#include "arena/astar.hpp"
#include "arena/bsp.hpp"
#include "arena/map.hpp"
#include "arena/navgrid.hpp"
#include "arena/navmesh.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace arena {

/// Per-clearance navigation products.
struct NavLayer {
    double clearance = 0.0;
    std::shared_ptr<const PathNetwork> net;
    std::shared_ptr<const SuccessorTable> table;
    std::shared_ptr<const GateArcIndex> gate_arcs;
};

/// Lazily built, shareable navigation data for one map. Layers are cached by
/// clearance; all accessors are safe to call from several match workers.
class NavData {
public:
    explicit NavData(const MapFile &map, bool accelerate_los = true);

    const Terrain &terrain() const { return terrain_; }
    const LineOfSight &los() const { return los_; }
    std::span<const Segment> gate_segments() const { return gates_; }

    const NavMesh &mesh() const;
    /// Uses the map's pre-placed waypoints when it has any, else the mesh.
    const NavLayer &layer(double clearance) const;
    std::shared_ptr<const NavGrid> grid(double cell_size) const;

    /// Navigator kinds: "direct", "grid", "apsp", "astar", "astar-smooth".
    std::unique_ptr<Navigator> make_navigator(const std::string &kind, const Agent &agent) const;
    static bool known_navigator(const std::string &kind);

private:
    Terrain terrain_;
    std::vector<Vec2> waypoints_;
    std::vector<Segment> gates_;
    LineOfSight los_;
    mutable std::mutex mutex_;
    mutable std::unique_ptr<NavMesh> mesh_;
    mutable std::map<double, std::unique_ptr<NavLayer>> layers_;
    mutable std::map<double, std::shared_ptr<const NavGrid>> grids_;
};

} // namespace arena
