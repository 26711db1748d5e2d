#include "arena/bsp.hpp"
#include "arena/rng.hpp"
#include "random_maps.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace arena;

namespace {

// Liang-Barsky: does the closed segment meet the closed rectangle?
bool segment_meets_rect(const Segment &s, const Rect &r) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {s.a.x - r.min_x, r.max_x - s.a.x, s.a.y - r.min_y, r.max_y - s.a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) t0 = std::max(t0, t);
        else t1 = std::min(t1, t);
        if (t0 > t1) return false;
    }
    return true;
}

} // namespace

TEST(Bsp, EmptyWorldIsOneLeaf) {
    const Terrain t{{0, 0, 50, 50}, {}};
    const BspTree tree = BspTree::build(t);
    EXPECT_EQ(tree.leaf_count(), 1u);
    EXPECT_TRUE(tree.nodes()[0].edges.empty());
    BspStats st;
    EXPECT_TRUE(tree.clear_line({1, 1}, {49, 49}, 0.5, {}, &st));
    EXPECT_EQ(st.leaves_visited, 1u);
    EXPECT_EQ(st.edges_tested, 0u);
}

TEST(Bsp, WestObstacleLeavesEastEmpty) {
    Terrain t{{0, 0, 100, 50}, {}};
    t.obstacles.push_back(rectangle({10, 10, 30, 40}));
    const BspTree tree = BspTree::build(t, 1);
    ASSERT_GT(tree.leaf_count(), 1u);
    for (const auto &n : tree.nodes()) {
        if (n.leaf() && n.region.min_x > 30.0 + kEpsilon) EXPECT_TRUE(n.edges.empty());
    }
    // whatever leaf holds the east half only sees the obstacle along its west border
    const auto &east = tree.nodes()[static_cast<std::size_t>(tree.leaf_at({75, 25}))];
    for (int e : east.edges) {
        const Segment s = tree.edge_segment(e);
        EXPECT_LE(std::max(s.a.x, s.b.x), east.region.min_x + kEpsilon);
    }
    BspStats st;
    EXPECT_TRUE(tree.clear_line({60, 5}, {95, 45}, 1.0, {}, &st));
}

TEST(Bsp, EdgesLiveInExactlyTheLeavesTheyMeet) {
    const MapFile m = arena::testing::scattered_map(3, 50);
    const BspTree tree = BspTree::build(m.terrain());
    const auto nodes = tree.nodes();
    for (std::size_t li = 0; li < nodes.size(); ++li) {
        const auto &n = nodes[li];
        if (!n.leaf()) continue;
        // Edges meeting the region must be present; nothing farther than the
        // coincidence tolerance may be. Splits run through edge midpoints, so
        // the band in between absorbs rounding of the exact touch.
        const std::set<int> got(n.edges.begin(), n.edges.end());
        for (int e = 0; e < static_cast<int>(tree.edges().size()); ++e) {
            const Segment s = tree.edge_segment(e);
            if (segment_meets_rect(s, n.region.inflated(1e-9))) EXPECT_TRUE(got.count(e)) << "leaf " << li << " edge " << e;
            if (!segment_meets_rect(s, n.region.inflated(2 * kEpsilon))) EXPECT_FALSE(got.count(e)) << "leaf " << li << " edge " << e;
        }
    }
}

TEST(Bsp, RandomQueriesMatchBruteForce) {
    const MapFile m = arena::testing::scattered_map(5, 50);
    const Terrain terrain = m.terrain();
    const BspTree tree = BspTree::build(terrain);
    SplitMix64 rng(99);
    BspStats st;
    int blocked = 0;
    std::size_t edges = 0;
    for (const auto &o : terrain.obstacles) edges += o.size();
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const Vec2 a{rng.uniform(0, 200), rng.uniform(0, 200)}, b{rng.uniform(0, 200), rng.uniform(0, 200)};
        const double c = rng.below(3) == 0 ? 0.0 : rng.uniform(0.0, 2.0);
        const bool brute = clear_line(a, b, terrain, c);
        ASSERT_EQ(tree.clear_line(a, b, c, {}, &st), brute) << "query " << i;
        blocked += brute ? 0 : 1;
    }
    EXPECT_GT(blocked, 0);
    EXPECT_LT(blocked, n);
    EXPECT_LT(static_cast<double>(st.edges_tested) / n, static_cast<double>(edges));
}

TEST(Bsp, WallsAreHonoured) {
    const MapFile m = arena::testing::scattered_map(8, 20, {0, 0, 100, 100});
    const BspTree tree = BspTree::build(m.terrain());
    const LineOfSight brute(m.terrain(), false);
    std::vector<Segment> walls{{{50, 0}, {50, 40}}, {{0, 70}, {60, 70}}};
    SplitMix64 rng(1);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 a{rng.uniform(0, 100), rng.uniform(0, 100)}, b{rng.uniform(0, 100), rng.uniform(0, 100)};
        ASSERT_EQ(tree.clear_line(a, b, 0.5, walls), brute.clear(a, b, 0.5, walls));
    }
}

TEST(Bsp, LongDiagonalSkipsLeaves) {
    const MapFile m = arena::testing::scattered_map(5, 50);
    const BspTree tree = BspTree::build(m.terrain());
    ASSERT_GT(tree.leaf_count(), 4u);
    BspStats st;
    tree.clear_line({0.5, 0.5}, {199.5, 199.5}, 0.0, {}, &st);
    EXPECT_LT(st.leaves_visited, tree.leaf_count());
}
