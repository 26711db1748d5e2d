#pragma once

#include "arena/bsp.hpp"
#include "arena/navigator.hpp"
#include "arena/navmesh.hpp"

#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace arena {

inline constexpr int kNoWaypoint = -1;
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// All-pairs distances plus first-hop successors, row-major n x n.
struct SuccessorTable {
    int n = 0;
    std::vector<double> dist;
    std::vector<int> next;

    double distance(int i, int j) const { return dist[index(i, j)]; }
    int successor(int i, int j) const { return next[index(i, j)]; }
    bool reachable(int i, int j) const { return successor(i, j) != kNoWaypoint; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
    }
    friend bool operator==(const SuccessorTable &, const SuccessorTable &) = default;
};

/// Floyd-Warshall with strict relaxation, so the first successor found under
/// ascending (k, i, j) order is kept on ties. Each reported distance is then
/// re-accumulated hop by hop along its successor path from i.
SuccessorTable floyd_warshall(const PathNetwork &net);

/// Successor-following walk, i first and j last; nullopt when unreachable.
std::optional<std::vector<int>> reconstruct_path(const SuccessorTable &table, int i, int j);

struct LegPlan {
    std::vector<Vec2> points;   ///< from, ..., to
    std::vector<int> waypoints; ///< network indices visited, in order
    double length = 0.0;
};

/// Direct leg when from and to see each other; otherwise attach to the
/// nearest visible entry and exit waypoints (ties by index) and follow the
/// table. Farther entry/exit pairs are tried in order before giving up.
std::optional<LegPlan> apsp_navigate(const SuccessorTable &table, const PathNetwork &net, Vec2 from, Vec2 to,
                                     const LineOfSight &los, double clearance, std::span<const Segment> walls = {});

/// Layout (little-endian): "APSP", u32 version = 1, u32 n, n*n f64 dist,
/// n*n i32 next (-1 = none).
void write_table(const SuccessorTable &table, std::ostream &out);
SuccessorTable read_table(std::istream &in);

/// Follows the precomputed table; legs are not re-validated against gates,
/// so a closed gate makes it wait (Stuck) until the leg clears.
class ApspNavigator final : public Navigator {
public:
    ApspNavigator(std::shared_ptr<const PathNetwork> net, std::shared_ptr<const SuccessorTable> table)
        : net_(std::move(net)), table_(std::move(table)) {}

    void set_target(const NavContext &ctx, Vec2 target) override;
    void clear_target() override;
    NavStep update(const NavContext &ctx) override;
    std::optional<Vec2> target() const override { return target_; }
    std::vector<Vec2> remaining_path() const override;

private:
    void plan(const NavContext &ctx);

    std::shared_ptr<const PathNetwork> net_;
    std::shared_ptr<const SuccessorTable> table_;
    std::optional<Vec2> target_;
    std::vector<Vec2> legs_;
    std::size_t cursor_ = 0;
    bool planned_ = false;
    bool stuck_ = false;
    long stuck_epoch_ = -1;
};

} // namespace arena
