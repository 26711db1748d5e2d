#include "arena/bsp.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace arena {

double segment_rect_distance(const Segment &s, const Rect &r) {
    if (r.contains(s.a, 0.0) || r.contains(s.b, 0.0)) {
        return 0.0;
    }
    const Vec2 c0{r.min_x, r.min_y};
    const Vec2 c1{r.max_x, r.min_y};
    const Vec2 c2{r.max_x, r.max_y};
    const Vec2 c3{r.min_x, r.max_y};
    return std::min({segment_distance(s, {c0, c1}), segment_distance(s, {c1, c2}), segment_distance(s, {c2, c3}),
                     segment_distance(s, {c3, c0})});
}

Segment BspTree::edge_segment(int e) const {
    const auto &ref = edges_[static_cast<std::size_t>(e)];
    return terrain_.obstacles[static_cast<std::size_t>(ref.polygon)].edge(static_cast<std::size_t>(ref.index));
}

BspTree BspTree::build(const Terrain &terrain, int max_edges_per_leaf, int max_depth) {
    BspTree tree;
    tree.terrain_ = terrain;
    std::vector<int> all;
    for (std::size_t p = 0; p < terrain.obstacles.size(); ++p) {
        for (std::size_t i = 0; i < terrain.obstacles[p].size(); ++i) {
            all.push_back(static_cast<int>(tree.edges_.size()));
            tree.edges_.push_back({static_cast<int>(p), static_cast<int>(i)});
        }
    }
    tree.nodes_.reserve(64);
    tree.build_node(terrain.bounds, std::move(all), 0, std::max(1, max_edges_per_leaf), std::clamp(max_depth, 0, 48));
    return tree;
}

int BspTree::build_node(Rect region, std::vector<int> edges, int depth, int max_edges, int max_depth) {
    const int id = static_cast<int>(nodes_.size());
    Node node;
    node.region = region;
    nodes_.push_back(std::move(node));
    auto make_leaf = [&]() {
        nodes_[static_cast<std::size_t>(id)].edges = std::move(edges);
        finish_leaf(nodes_[static_cast<std::size_t>(id)]);
        return id;
    };
    if (static_cast<int>(edges.size()) <= max_edges || depth >= max_depth) {
        return make_leaf();
    }
    // Median edge midpoint on the preferred axis, then on the other one; when
    // neither separates anything, halve the region to carve off empty space.
    for (int attempt = 0; attempt < 4; ++attempt) {
        const int axis = (depth + attempt) % 2;
        const double lo = axis == 0 ? region.min_x : region.min_y;
        const double hi = axis == 0 ? region.max_x : region.max_y;
        double split = 0.5 * (lo + hi);
        if (attempt < 2) {
            std::vector<double> coords;
            coords.reserve(edges.size());
            for (int e : edges) {
                const Vec2 m = edge_segment(e).midpoint();
                coords.push_back(axis == 0 ? m.x : m.y);
            }
            std::sort(coords.begin(), coords.end());
            split = coords[coords.size() / 2];
        }
        if (split <= lo + kEpsilon || split >= hi - kEpsilon) {
            continue;
        }
        Rect left = region;
        Rect right = region;
        if (axis == 0) {
            left.max_x = split;
            right.min_x = split;
        } else {
            left.max_y = split;
            right.min_y = split;
        }
        std::vector<int> in_left;
        std::vector<int> in_right;
        for (int e : edges) {
            const Segment s = edge_segment(e);
            if (segment_rect_distance(s, left) <= kEpsilon) in_left.push_back(e);
            if (segment_rect_distance(s, right) <= kEpsilon) in_right.push_back(e);
        }
        if (in_left.size() == edges.size() && in_right.size() == edges.size()) {
            continue;
        }
        nodes_[static_cast<std::size_t>(id)].axis = axis;
        nodes_[static_cast<std::size_t>(id)].split = split;
        const int l = build_node(left, std::move(in_left), depth + 1, max_edges, max_depth);
        const int r = build_node(right, std::move(in_right), depth + 1, max_edges, max_depth);
        nodes_[static_cast<std::size_t>(id)].left = l;
        nodes_[static_cast<std::size_t>(id)].right = r;
        return id;
    }
    return make_leaf();
}

void BspTree::finish_leaf(Node &node) const {
    std::vector<char> has_edge(terrain_.obstacles.size(), 0);
    for (int e : node.edges) {
        has_edge[static_cast<std::size_t>(edges_[static_cast<std::size_t>(e)].polygon)] = 1;
    }
    const Vec2 c = node.region.center();
    for (std::size_t p = 0; p < terrain_.obstacles.size(); ++p) {
        if (!has_edge[p] && bounding_box(terrain_.obstacles[p]).contains(c, 0.0) &&
            point_strictly_inside(c, terrain_.obstacles[p])) {
            node.covering.push_back(static_cast<int>(p));
        }
    }
}

void BspTree::collect_leaves(int node, const Segment &s, double pad, std::vector<int> &out) const {
    const Node &n = nodes_[static_cast<std::size_t>(node)];
    if (segment_rect_distance(s, n.region) > pad) {
        return;
    }
    if (n.leaf()) {
        out.push_back(node);
        return;
    }
    collect_leaves(n.left, s, pad, out);
    collect_leaves(n.right, s, pad, out);
}

std::vector<int> BspTree::leaves_near(const Segment &s, double pad) const {
    std::vector<int> out;
    if (!nodes_.empty()) {
        collect_leaves(0, s, pad, out);
    }
    return out;
}

int BspTree::leaf_at(Vec2 p) const {
    int node = 0;
    while (!nodes_[static_cast<std::size_t>(node)].leaf()) {
        const Node &n = nodes_[static_cast<std::size_t>(node)];
        const double v = n.axis == 0 ? p.x : p.y;
        node = v <= n.split ? n.left : n.right;
    }
    return node;
}

bool BspTree::clear_line(Vec2 a, Vec2 b, double clearance, std::span<const Segment> walls, BspStats *stats) const {
    if (lex_less(b, a)) {
        std::swap(a, b);
    }
    if (!capsule_in_bounds(terrain_.bounds, a, b, clearance)) {
        return false;
    }
    const Segment s{a, b};
    const double pad = std::max(clearance, 0.0) + kEpsilon;
    const Rect box{std::min(a.x, b.x) - pad, std::min(a.y, b.y) - pad, std::max(a.x, b.x) + pad,
                   std::max(a.y, b.y) + pad};

    // Per-thread marks so each obstacle runs the exact test at most once.
    thread_local std::vector<std::uint32_t> marks;
    thread_local std::uint32_t stamp = 0;
    if (marks.size() < terrain_.obstacles.size()) marks.resize(terrain_.obstacles.size(), 0);
    if (++stamp == 0) {
        std::fill(marks.begin(), marks.end(), 0);
        stamp = 1;
    }
    auto blocked = [&](int p) {
        auto &m = marks[static_cast<std::size_t>(p)];
        if (m == stamp) return false;
        m = stamp;
        const Polygon &poly = terrain_.obstacles[static_cast<std::size_t>(p)];
        if (stats) stats->edges_tested += poly.size();
        return polygon_blocks(poly, a, b, clearance);
    };

    for (int p : nodes_[static_cast<std::size_t>(leaf_at(a))].covering) {
        if (blocked(p)) return false;
    }
    // Leaves near a first: a blocked sight line usually stops early.
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node &n = nodes_[static_cast<std::size_t>(stack[--top])];
        if (!n.region.overlaps(box) || segment_rect_distance(s, n.region) > pad) continue;
        if (n.leaf()) {
            if (stats) ++stats->leaves_visited;
            for (int e : n.edges) {
                if (blocked(edges_[static_cast<std::size_t>(e)].polygon)) return false;
            }
            continue;
        }
        const bool a_left = (n.axis == 0 ? a.x : a.y) <= n.split;
        stack[top++] = a_left ? n.right : n.left;
        stack[top++] = a_left ? n.left : n.right;
    }
    for (const auto &wall : walls) {
        if (wall_blocks(wall, a, b, clearance)) {
            return false;
        }
    }
    return true;
}

std::size_t BspTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node &n) { return n.leaf(); }));
}

std::size_t BspTree::depth() const {
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [node, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        const Node &n = nodes_[static_cast<std::size_t>(node)];
        if (!n.leaf()) {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return best;
}

LineOfSight::LineOfSight(Terrain terrain, bool accelerate) : terrain_(std::move(terrain)) {
    if (accelerate) {
        bsp_ = BspTree::build(terrain_);
    }
}

bool LineOfSight::clear(Vec2 a, Vec2 b, double clearance, std::span<const Segment> walls) const {
    if (bsp_) {
        return bsp_->clear_line(a, b, clearance, walls);
    }
    return arena::clear_line(a, b, terrain_, clearance, walls);
}

} // namespace arena
