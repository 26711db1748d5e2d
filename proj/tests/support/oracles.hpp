#pragma once

#include "arena/btree.hpp"
#include "arena/fsm.hpp"
#include "arena/map.hpp"
#include "arena/navmesh.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <string>
#include <vector>

// Independent reference implementations used to check the engine modules.
// None of these call the code they are checking.
namespace arena::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dijkstra from `source` over the arc list, skipping arcs for which
/// `blocked(arc)` is true. Distances accumulate from the source outwards.
std::vector<double> uniform_cost(const PathNetwork &net, int source,
                                 const std::function<bool(int)> &blocked = {});

/// Sum of Euclidean hop lengths along a waypoint index path.
double hop_length(const PathNetwork &net, const std::vector<int> &path);

// ---- navmesh -------------------------------------------------------------------

struct MeshReport {
    int cells = 0;
    int nonconvex = 0;
    int overlapping_pairs = 0;
    int uncovered_samples = 0;
    int cells_in_obstacles = 0;
    int bad_arcs = 0;
    int arcs = 0;
    double area_error = 0.0; ///< |sum(cells) - free area|
    std::vector<std::string> notes;
    int violations() const {
        return nonconvex + overlapping_pairs + uncovered_samples + cells_in_obstacles + bad_arcs;
    }
};

/// Convexity, pairwise disjointness (intersection area of convex clips),
/// coverage by random sampling, and clear_line on every arc of the pathnode
/// network at each clearance.
MeshReport check_navmesh(const MapFile &map, const NavMesh &mesh, int samples, std::uint64_t seed,
                         const std::vector<double> &clearances = {0.5, 1.0, 1.5});

/// Sutherland-Hodgman clip of convex `subject` by convex `clip`.
std::vector<Vec2> convex_intersection(const std::vector<Vec2> &subject, const std::vector<Vec2> &clip);
double shoelace(const std::vector<Vec2> &pts);

/// Even-odd containment with a boundary tolerance: 1 inside, 0 on the
/// boundary, -1 outside.
int classify_point(Vec2 p, const std::vector<Vec2> &poly, double eps = 1e-7);

/// Free space by the definition: inside bounds and not strictly inside an obstacle.
bool free_point(Vec2 p, const MapFile &map);

// ---- behaviour trees -------------------------------------------------------------

/// Random scripted tree in the scripted_tree_from_json format.
nlohmann::json random_bt(std::uint64_t seed, int max_depth = 4, int max_children = 4);

/// Minimal recursive interpreter over the JSON form; produces the same trace
/// vocabulary as BehaviorTree.
std::vector<BtTraceEvent> reference_bt_trace(const nlohmann::json &tree, int ticks, bool reactive);

/// Runs the engine's tree for `ticks` then resets it, so every activation is closed.
std::vector<BtTraceEvent> run_and_reset(const nlohmann::json &tree, int ticks, bool reactive);

/// Trace properties shared by both execution modes: hook pairing, sequence
/// order, choice short-circuit and, when memoryful, no re-ticking of left
/// siblings while resuming. Returns the first violation or an empty string.
std::string check_bt_properties(const nlohmann::json &tree, const std::vector<BtTraceEvent> &trace, bool reactive);

// ---- state machines --------------------------------------------------------------

struct FsmRecord {
    int tick = 0;
    std::string state;
    FsmHook hook;
};

/// Trace has the shape (enter tick* exit)* [enter tick*], hooks within one
/// group name the same state, and no tick holds more than one exit. Returns
/// an empty string when well formed, else the first problem.
std::string check_fsm_trace(const std::vector<FsmRecord> &trace);

} // namespace arena::testing
