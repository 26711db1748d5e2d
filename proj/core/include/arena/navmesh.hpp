#pragma once

#include "arena/bsp.hpp"
#include "arena/geometry.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace arena {

/// Convex decomposition of navigable space.
struct NavMesh {
    struct Adjacency {
        int a = 0; ///< a < b
        int b = 0;
        Segment edge;
    };

    std::vector<Polygon> cells;
    std::vector<Adjacency> adjacency; ///< sorted by (a, b)

    bool empty() const { return cells.empty(); }
    /// First cell containing p (closed test), if any.
    std::optional<int> locate(Vec2 p) const;
    std::vector<int> neighbors(int cell) const;
};

/// Ear-clipping triangulation of bounds minus obstacles (holes joined by
/// bridge edges), then greedy Hertel-Mehlhorn merging into convex cells.
/// Returns an empty mesh when nothing is navigable.
NavMesh build_navmesh(const Terrain &terrain);

/// Undirected waypoint graph. Arc lengths are Euclidean.
class PathNetwork {
public:
    struct Arc {
        int a = 0; ///< a < b
        int b = 0;
        double length = 0.0;
    };
    struct Neighbor {
        int node = 0;
        int arc = 0;
    };

    PathNetwork() = default;
    /// Pairs are normalised, deduplicated and sorted; self-loops and
    /// out-of-range indices throw std::invalid_argument.
    PathNetwork(std::vector<Vec2> waypoints, std::vector<std::pair<int, int>> arcs);

    std::size_t size() const { return waypoints_.size(); }
    std::span<const Vec2> waypoints() const { return waypoints_; }
    Vec2 waypoint(int i) const { return waypoints_[static_cast<std::size_t>(i)]; }
    std::span<const Arc> arcs() const { return arcs_; }
    const Arc &arc(int i) const { return arcs_[static_cast<std::size_t>(i)]; }
    std::span<const Neighbor> neighbors(int node) const;
    std::optional<int> find_arc(int a, int b) const;

private:
    std::vector<Vec2> waypoints_;
    std::vector<Arc> arcs_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
};

/// One waypoint per shared edge with usable width >= 2 * clearance; arcs join
/// every mutually visible pair at that clearance.
PathNetwork place_pathnodes(const NavMesh &mesh, const Terrain &terrain, double clearance,
                            const LineOfSight *los = nullptr);

/// Arcs between every pair of the given waypoints that passes clear_line.
/// Throws ValidationError("waypoint.navigable") naming the first bad index.
PathNetwork connect_waypoints(const Terrain &terrain, std::span<const Vec2> waypoints, double clearance,
                              const LineOfSight *los = nullptr);

std::string navmesh_to_json(const NavMesh &mesh);
NavMesh navmesh_from_json(const std::string &text);
std::string network_to_json(const PathNetwork &net, double clearance);
PathNetwork network_from_json(const std::string &text);
std::vector<Vec2> waypoints_from_json(const std::string &text);

} // namespace arena
