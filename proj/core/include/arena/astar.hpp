#pragma once

#include "arena/bsp.hpp"
#include "arena/navigator.hpp"
#include "arena/navmesh.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace arena {

struct SearchResult {
    bool found = false;
    std::vector<int> path;
    double cost = 0.0;
    std::size_t expanded = 0;
};

/// Returns true for arcs (by index into net.arcs()) that must not be used.
using ArcBlocked = std::function<bool(int arc)>;
/// Called on every expansion with (node, g, h).
using ExpandHook = std::function<void(int node, double g, double h)>;

/// A* with the straight-line heuristic. Equal f is broken by larger g, then
/// by lower waypoint index.
SearchResult astar(const PathNetwork &net, const ArcBlocked &blocked, int start, int goal,
                   const ExpandHook &on_expand = {});

/// Greedy string-pull: from each anchor jump to the farthest later vertex
/// visible at `clearance`. Endpoints are kept.
std::vector<Vec2> smooth(std::span<const Vec2> path, const LineOfSight &los, double clearance,
                         std::span<const Segment> walls = {});

double path_length(std::span<const Vec2> path);

/// Static data an A* navigator needs: the network for its clearance and, per
/// gate, the arcs that gate would block when closed.
struct GateArcIndex {
    std::vector<std::vector<int>> arcs_by_gate;
};
GateArcIndex index_gate_arcs(const PathNetwork &net, std::span<const Segment> gates, double clearance);

/// Plans with A*, checks the current leg every tick, and replans around
/// gates that block it. Block marks last until the gate toggles again.
class ReplanningNavigator final : public Navigator {
public:
    ReplanningNavigator(std::shared_ptr<const PathNetwork> net, std::shared_ptr<const GateArcIndex> gates,
                        bool smoothing);

    void set_target(const NavContext &ctx, Vec2 target) override;
    void clear_target() override;
    NavStep update(const NavContext &ctx) override;
    std::optional<Vec2> target() const override { return target_; }
    std::vector<Vec2> remaining_path() const override;

    int replans() const { return replans_; }
    bool arc_marked(int arc, const WorldState &world) const;

private:
    bool plan(const NavContext &ctx);

    std::shared_ptr<const PathNetwork> net_;
    std::shared_ptr<const GateArcIndex> gates_;
    bool smoothing_;
    std::optional<Vec2> target_;
    std::vector<Vec2> legs_;
    std::size_t cursor_ = 0;
    bool need_plan_ = false;
    bool stuck_ = false;
    long stuck_epoch_ = -1;
    int replans_ = 0;
    std::map<int, std::pair<int, int>> marks_; ///< arc -> (gate id, toggles when marked)
};

} // namespace arena
