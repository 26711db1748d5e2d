#include "arena/navgrid.hpp"
#include "arena/rng.hpp"
#include "common.hpp"
#include "oracles.hpp"
#include "random_maps.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace arena;

namespace {

// Cell is free by sampling a lattice of points over its closed rectangle.
bool sampled_free(const NavGrid &g, int c, int r, const std::vector<Polygon> &obstacles, int n = 9) {
    const Rect cell = g.cell_rect(c, r);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const Vec2 p{cell.min_x + cell.width() * i / n, cell.min_y + cell.height() * j / n};
            for (const auto &o : obstacles) {
                if (arena::testing::classify_point(p, o.vertices) > 0) return false;
            }
        }
    }
    return true;
}

// The greedy rule evaluated by hand: does any admissible neighbour centre
// get strictly closer than the current position?
bool neighbour_improves(const NavGrid &g, Vec2 from, Vec2 to) {
    const auto fc = g.cell_of(from);
    const double here = distance(from, to);
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int c = fc->first + dc, r = fc->second + dr;
            if (!g.at(c, r)) continue;
            if (dc && dr && (!g.at(fc->first + dc, fc->second) || !g.at(fc->first, fc->second + dr))) continue;
            if (distance(g.center(c, r), to) < here - kEpsilon) return true;
        }
    }
    return false;
}

} // namespace

TEST(NavGrid, ObstacleFreeWorldIsAllTraversable) {
    const NavGrid g = build_navgrid({{0, 0, 20, 10}, {}}, 2.0);
    EXPECT_EQ(g.cols, 10);
    EXPECT_EQ(g.rows, 5);
    EXPECT_EQ(g.traversable_count(), 50u);
}

TEST(NavGrid, FullyCoveredWorldIsBlocked) {
    const NavGrid g = build_navgrid({{0, 0, 20, 10}, {rectangle({0, 0, 20, 10})}}, 1.0);
    EXPECT_EQ(g.traversable_count(), 0u);
}

TEST(NavGrid, SquareSpanningFourCells) {
    const NavGrid g = build_navgrid({{0, 0, 8, 8}, {rectangle({2, 2, 4, 4})}}, 1.0);
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            const bool inside = c >= 2 && c <= 3 && r >= 2 && r <= 3;
            EXPECT_EQ(g.at(c, r), !inside) << c << "," << r;
        }
    }
}

TEST(NavGrid, PartialCellsAreBlocked) {
    const NavGrid g = build_navgrid({{0, 0, 10, 10}, {rectangle({2.5, 2.5, 3.5, 3.5})}}, 1.0);
    EXPECT_FALSE(g.at(2, 2));
    EXPECT_FALSE(g.at(3, 3));
    EXPECT_TRUE(g.at(4, 4));
    EXPECT_EQ(g.traversable_count(), 96u);
}

TEST(NavGrid, RaggedBoundsDropTheOverhang) {
    const NavGrid g = build_navgrid({{0, 0, 5, 5}, {}}, 2.0);
    EXPECT_EQ(g.cols, 3);
    EXPECT_FALSE(g.at(2, 0)); // spills over the bounds
    EXPECT_TRUE(g.at(1, 1));
}

TEST(NavGrid, ConservativeOnRandomMaps) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const MapFile m = arena::testing::random_map(seed, 8);
        const NavGrid g = build_navgrid(m.terrain(), 2.0);
        for (int r = 0; r < g.rows; ++r) {
            for (int c = 0; c < g.cols; ++c) {
                if (g.at(c, r)) {
                    EXPECT_TRUE(sampled_free(g, c, r, m.obstacles)) << "seed " << seed << " cell " << c << "," << r;
                } else {
                    bool near = false;
                    for (const auto &o : m.obstacles) near = near || bounding_box(o).overlaps(g.cell_rect(c, r), -1e-9);
                    EXPECT_TRUE(near) << "seed " << seed << " cell " << c << "," << r;
                }
            }
        }
    }
}

TEST(NavGrid, CorridorApproachesMonotonically) {
    const NavGrid g = build_navgrid({{0, 0, 40, 6}, {}}, 2.0);
    Vec2 at{1, 3};
    const Vec2 goal{39, 3};
    double last = distance(at, goal);
    for (int step = 0; step < 40; ++step) {
        const GridStep s = grid_navigate(g, at, goal);
        if (s.kind == GridStep::Kind::Arrived) break;
        ASSERT_EQ(s.kind, GridStep::Kind::Move);
        EXPECT_LT(distance(s.next, goal), last);
        last = distance(s.next, goal);
        at = s.next;
    }
    EXPECT_EQ(grid_navigate(g, at, goal).kind, GridStep::Kind::Arrived);
}

TEST(NavGrid, CupTrapsTheGreedyWalk) {
    const MapFile m = arena::testing::shipped_map("cup");
    const NavGrid g = build_navgrid(m.terrain(), 2.0);
    Vec2 at = *m.gatherer_spawn;
    const Vec2 goal = m.crystals[0]; // inside the cup
    GridStep s;
    for (int step = 0; step < 100; ++step) {
        s = grid_navigate(g, at, goal);
        if (s.kind != GridStep::Kind::Move) break;
        at = s.next;
    }
    ASSERT_EQ(s.kind, GridStep::Kind::Failed);
    EXPECT_LT(at.y, 10.0); // stopped under the floor of the cup
    EXPECT_FALSE(neighbour_improves(g, at, goal));
}

TEST(NavGrid, SameFromAndToArrives) {
    const NavGrid g = build_navgrid({{0, 0, 10, 10}, {}}, 1.0);
    EXPECT_EQ(grid_navigate(g, {4.5, 4.5}, {4.5, 4.5}).kind, GridStep::Kind::Arrived);
}

TEST(NavGrid, BlockedTargetFails) {
    const NavGrid g = build_navgrid({{0, 0, 10, 10}, {rectangle({6, 6, 8, 8})}}, 1.0);
    EXPECT_EQ(grid_navigate(g, {1.5, 1.5}, {7, 7}).kind, GridStep::Kind::Failed);
}

TEST(NavGrid, GreedyStepsAlwaysImproveOrFail) {
    SplitMix64 rng(5);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const MapFile m = arena::testing::random_map(seed, 6);
        const NavGrid g = build_navgrid(m.terrain(), 2.0);
        for (int k = 0; k < 20; ++k) {
            Vec2 at{rng.uniform(0, 100), rng.uniform(0, 100)}, goal{rng.uniform(0, 100), rng.uniform(0, 100)};
            const auto fc = g.cell_of(at);
            if (!g.at(fc->first, fc->second)) continue;
            for (int step = 0; step < 200; ++step) {
                const GridStep s = grid_navigate(g, at, goal);
                if (s.kind != GridStep::Kind::Move) {
                    const auto tc = g.cell_of(goal);
                    if (s.kind == GridStep::Kind::Failed && g.at(tc->first, tc->second) && fc != tc) {
                        EXPECT_FALSE(neighbour_improves(g, at, goal));
                    }
                    break;
                }
                ASSERT_LT(distance(s.next, goal), distance(at, goal));
                at = s.next;
            }
        }
    }
}

TEST(NavGrid, JsonTable) {
    const NavGrid g = build_navgrid({{0, 0, 4, 2}, {rectangle({0, 0, 1, 1})}}, 1.0);
    const auto j = nlohmann::json::parse(navgrid_to_json(g));
    EXPECT_EQ(j["cols"], 4);
    EXPECT_EQ(j["traversable"][0], "0111");
    EXPECT_EQ(j["traversable"][1], "1111");
}
