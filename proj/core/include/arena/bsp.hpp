#pragma once

#include "arena/geometry.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace arena {

struct BspStats {
    std::size_t leaves_visited = 0;
    std::size_t edges_tested = 0;
};

/// Distance from a segment to a closed rectangle; zero when they meet.
double segment_rect_distance(const Segment &s, const Rect &r);

/// Axis-aligned binary space partition over static obstacle edges.
///
/// Interior nodes split their region at the median edge midpoint, alternating
/// x and y, falling back to the region centre when the median separates
/// nothing. Leaves keep every edge that touches their region (edges are
/// duplicated, never cut) plus the obstacles that wholly cover the leaf, so
/// queries can run the exact per-obstacle test on a filtered candidate set.
/// Gates are not part of the tree; pass them as walls at query time.
class BspTree {
public:
    struct EdgeRef {
        int polygon = 0;
        int index = 0;
    };

    struct Node {
        Rect region;
        int axis = -1; ///< -1 for leaves, 0 = x, 1 = y
        double split = 0.0;
        int left = -1;
        int right = -1;
        std::vector<int> edges;    ///< leaves only
        std::vector<int> covering; ///< obstacles containing the whole leaf
        bool leaf() const { return axis < 0; }
    };

    BspTree() = default;

    static BspTree build(const Terrain &terrain, int max_edges_per_leaf = 8, int max_depth = 16);

    /// Same verdict as arena::clear_line over the full terrain.
    bool clear_line(Vec2 a, Vec2 b, double clearance, std::span<const Segment> walls = {},
                    BspStats *stats = nullptr) const;

    /// Indices of leaves whose region lies within `pad` of the segment.
    std::vector<int> leaves_near(const Segment &s, double pad) const;

    /// Leaf whose region contains p (p is clamped to the root region).
    int leaf_at(Vec2 p) const;

    const Terrain &terrain() const { return terrain_; }
    std::span<const Node> nodes() const { return nodes_; }
    std::span<const EdgeRef> edges() const { return edges_; }
    Segment edge_segment(int e) const;
    std::size_t leaf_count() const;
    std::size_t depth() const;

private:
    int build_node(Rect region, std::vector<int> edges, int depth, int max_edges, int max_depth);
    void finish_leaf(Node &node) const;
    void collect_leaves(int node, const Segment &s, double pad, std::vector<int> &out) const;

    Terrain terrain_;
    std::vector<Node> nodes_;
    std::vector<EdgeRef> edges_;
};

/// Line-of-sight service: the BSP when available, brute force otherwise.
class LineOfSight {
public:
    explicit LineOfSight(Terrain terrain, bool accelerate = true);

    bool clear(Vec2 a, Vec2 b, double clearance, std::span<const Segment> walls = {}) const;

    const Terrain &terrain() const { return terrain_; }
    const BspTree *bsp() const { return bsp_ ? &*bsp_ : nullptr; }

private:
    Terrain terrain_;
    std::optional<BspTree> bsp_;
};

} // namespace arena
