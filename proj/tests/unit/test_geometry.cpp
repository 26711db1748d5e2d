#include "arena/geometry.hpp"
#include "arena/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace arena;

namespace {

Polygon unit_square() { return rectangle({0, 0, 1, 1}); }

// closest distance between two segments by dense sampling of both
double sampled_gap(const Segment &s, const Segment &t, int n = 400) {
    double best = 1e18;
    for (int i = 0; i <= n; ++i) {
        const Vec2 p = s.a + (s.b - s.a) * (double(i) / n);
        for (int j = 0; j <= n; ++j) {
            const Vec2 q = t.a + (t.b - t.a) * (double(j) / n);
            best = std::min(best, distance(p, q));
        }
    }
    return best;
}

// interior angles of a convex polygon sum to (n - 2) * pi and none exceeds pi
bool convex_by_angles(const Polygon &p) {
    const std::size_t n = p.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 prev = p.vertices[(i + n - 1) % n], cur = p.vertices[i], next = p.vertices[(i + 1) % n];
        const Vec2 u = prev - cur, v = next - cur;
        double a = std::atan2(cross(v, u), dot(v, u)); // ccw polygon: interior angle from v to u
        if (a < 0) a += 2 * std::numbers::pi;
        if (a > std::numbers::pi + 1e-9) return false;
        sum += a;
    }
    return std::abs(sum - (double(n) - 2) * std::numbers::pi) < 1e-9;
}

double brute_polygon_distance(const Segment &s, const Polygon &poly) {
    double best = 1e18;
    for (std::size_t i = 0; i < poly.size(); ++i) best = std::min(best, sampled_gap(s, poly.edge(i), 160));
    return best;
}

} // namespace

TEST(Geometry, PerpendicularSegmentsCross) {
    EXPECT_TRUE(segments_intersect({{0, 0}, {2, 0}}, {{1, -1}, {1, 1}}));
    EXPECT_TRUE(segments_cross_properly({{0, 0}, {2, 0}}, {{1, -1}, {1, 1}}));
}

TEST(Geometry, ParallelDisjointSegments) {
    EXPECT_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}));
}

TEST(Geometry, CollinearOverlapMatchesSampling) {
    const Segment s{{0, 0}, {2, 0}}, t{{1, 0}, {3, 0}};
    EXPECT_TRUE(segments_intersect(s, t));
    EXPECT_LT(sampled_gap(s, t), 1e-9);
    EXPECT_FALSE(segments_cross_properly(s, t));
}

TEST(Geometry, RandomSegmentPairsAgreeWithSampling) {
    SplitMix64 rng(4);
    for (int k = 0; k < 300; ++k) {
        auto pt = [&] { return Vec2{std::round(rng.uniform(0, 6)), std::round(rng.uniform(0, 6))}; };
        const Segment s{pt(), pt()}, t{pt(), pt()};
        if (s.length() == 0 || t.length() == 0) continue;
        const double gap = segment_distance(s, t);
        EXPECT_NEAR(gap, sampled_gap(s, t, 120), 0.06);
        if (gap > 0.06) EXPECT_FALSE(segments_intersect(s, t));
        if (segments_intersect(s, t)) EXPECT_LT(gap, 1e-6);
    }
}

TEST(Geometry, PointInUnitSquare) {
    EXPECT_TRUE(point_in_polygon({0.5, 0.5}, unit_square()));
    EXPECT_FALSE(point_in_polygon({2, 2}, unit_square()));
    EXPECT_TRUE(point_in_polygon({1, 0.5}, unit_square()));
    EXPECT_FALSE(point_strictly_inside({1, 0.5}, unit_square()));
}

TEST(Geometry, Convexity) {
    EXPECT_TRUE(is_convex(unit_square()));
    Polygon l{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}};
    EXPECT_FALSE(is_convex(l));
    EXPECT_FALSE(convex_by_angles(l));
    Polygon tri{{{0, 0}, {2, 0}, {4, 0}, {2, 3}}}; // inserted collinear vertex
    EXPECT_TRUE(is_convex(tri));
    EXPECT_TRUE(convex_by_angles(tri));
}

TEST(Geometry, RandomPolygonsConvexityAgreesWithAngleSum) {
    SplitMix64 rng(11);
    for (int k = 0; k < 200; ++k) {
        Polygon p;
        const int n = 3 + static_cast<int>(rng.below(6));
        std::vector<double> angles;
        for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(0, 2 * std::numbers::pi));
        std::sort(angles.begin(), angles.end());
        for (double a : angles) {
            const double r = rng.below(2) ? 5.0 : rng.uniform(1.0, 5.0);
            p.vertices.push_back({r * std::cos(a), r * std::sin(a)});
        }
        if (std::abs(signed_area(p)) < 1e-3) continue;
        make_ccw(p);
        EXPECT_EQ(is_convex(p), convex_by_angles(p)) << "polygon " << k;
    }
}

TEST(Geometry, EmptyWorldIsClear) {
    const Rect b{0, 0, 10, 10};
    EXPECT_TRUE(clear_line({1, 1}, {9, 9}, {}, b, 0.5));
}

TEST(Geometry, SegmentThroughObstacleBlocked) {
    const Rect b{0, 0, 10, 10};
    const std::vector<Polygon> obs{rectangle({4, 4, 6, 6})};
    EXPECT_FALSE(clear_line({1, 5}, {9, 5}, obs, b, 0.0));
}

TEST(Geometry, ClearanceAgainstNearbyEdge) {
    const Rect b{0, 0, 10, 10};
    const std::vector<Polygon> obs{rectangle({4, 4, 6, 6})};
    const Segment s{{1, 3.6}, {9, 3.6}}; // 0.4 below the bottom edge
    EXPECT_NEAR(brute_polygon_distance(s, obs[0]), 0.4, 1e-6);
    EXPECT_FALSE(clear_line(s.a, s.b, obs, b, 0.5));
    EXPECT_TRUE(clear_line(s.a, s.b, obs, b, 0.3));
}

TEST(Geometry, ClearLineMatchesBruteDistance) {
    SplitMix64 rng(21);
    const Rect b{0, 0, 20, 20};
    const std::vector<Polygon> obs{rectangle({5, 5, 9, 8}), Polygon{{{12, 12}, {16, 12}, {14, 16}}}};
    int checked = 0;
    for (int k = 0; k < 400; ++k) {
        const Vec2 p{rng.uniform(2, 18), rng.uniform(2, 18)}, q{rng.uniform(2, 18), rng.uniform(2, 18)};
        const double c = rng.uniform(0.3, 1.5);
        bool inside = false;
        for (const auto &o : obs) inside = inside || point_in_polygon(p, o) || point_in_polygon(q, o);
        if (inside) continue;
        double gap = 1e18;
        for (const auto &o : obs) gap = std::min(gap, brute_polygon_distance({p, q}, o));
        if (std::abs(gap - c) < 0.15) continue; // too close to call with sampling
        EXPECT_EQ(clear_line(p, q, obs, b, c), gap > c) << k;
        EXPECT_EQ(clear_line(p, q, obs, b, c), clear_line(q, p, obs, b, c));
        ++checked;
    }
    EXPECT_GT(checked, 200);
}

TEST(Geometry, WallsBlockWithClearance) {
    const Rect b{0, 0, 10, 10};
    const Segment wall{{5, 0}, {5, 10}};
    EXPECT_FALSE(clear_line({1, 5}, {9, 5}, {}, b, 0.0, std::span<const Segment>(&wall, 1)));
    const Segment low{{5, 0}, {5, 4}};
    EXPECT_FALSE(clear_line({1, 4.5}, {9, 4.5}, {}, b, 0.6, std::span<const Segment>(&low, 1)));
    EXPECT_TRUE(clear_line({1, 4.5}, {9, 4.5}, {}, b, 0.4, std::span<const Segment>(&low, 1)));
}

TEST(Geometry, BoundsRespectClearance) {
    EXPECT_FALSE(capsule_in_bounds({0, 0, 10, 10}, {0.5, 5}, {5, 5}, 1.0));
    EXPECT_TRUE(capsule_in_bounds({0, 0, 10, 10}, {1.0, 5}, {5, 5}, 1.0));
}
