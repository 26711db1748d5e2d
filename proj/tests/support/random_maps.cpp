#include "random_maps.hpp"

#include "arena/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace arena::testing {

namespace {

double snap(double v) { return std::round(v * 2.0) / 2.0; }

Polygon shape(SplitMix64 &rng, Rect area) {
    const double w = snap(rng.uniform(2.0, 14.0));
    const double h = snap(rng.uniform(2.0, 14.0));
    const double x = snap(rng.uniform(area.min_x + 1.0, area.max_x - w - 1.0));
    const double y = snap(rng.uniform(area.min_y + 1.0, area.max_y - h - 1.0));
    Polygon p;
    switch (rng.below(5)) {
    case 0:
        p = rectangle({x, y, x + w, y + h});
        break;
    case 1:
        p.vertices = {{x, y}, {x + w, y}, {snap(x + rng.uniform(0.0, w)), y + h}};
        break;
    case 2: { // convex blob
        const int n = 5 + static_cast<int>(rng.below(4));
        const Vec2 c{x + w / 2, y + h / 2};
        for (int i = 0; i < n; ++i) {
            const double a = 2.0 * std::numbers::pi * i / n;
            p.vertices.push_back({c.x + std::cos(a) * w / 2, c.y + std::sin(a) * h / 2});
        }
        break;
    }
    case 3: { // L
        const double t = std::max(1.0, snap(std::min(w, h) / 3.0));
        p.vertices = {{x, y}, {x + w, y}, {x + w, y + t}, {x + t, y + t}, {x + t, y + h}, {x, y + h}};
        break;
    }
    default: { // U, opening up
        const double t = std::max(1.0, snap(std::min(w, h) / 4.0));
        if (w < 3 * t + 1.0) return rectangle({x, y, x + w, y + h});
        p.vertices = {{x, y},         {x + w, y},         {x + w, y + h}, {x + w - t, y + h},
                      {x + w - t, y + t}, {x + t, y + t}, {x + t, y + h}, {x, y + h}};
        break;
    }
    }
    make_ccw(p);
    return p;
}

} // namespace

MapFile random_map(std::uint64_t seed, int obstacles, Rect bounds) {
    SplitMix64 rng(SplitMix64::mix(seed + 0x51));
    MapFile m;
    m.name = "random-" + std::to_string(seed);
    m.bounds = bounds;
    int attempts = 0;
    while (static_cast<int>(m.obstacles.size()) < obstacles && attempts++ < obstacles * 50) {
        Polygon p = shape(rng, bounds);
        // Occasionally butt it against an existing obstacle's bounding box side.
        if (!m.obstacles.empty() && rng.below(4) == 0) {
            const Rect o = bounding_box(m.obstacles[rng.below(m.obstacles.size())]);
            const Rect pb = bounding_box(p);
            const double dx = o.max_x - pb.min_x;
            for (auto &v : p.vertices) v.x += dx;
        }
        bool ok = true;
        for (auto v : p.vertices) ok = ok && bounds.contains(v, 0.0);
        for (const auto &q : m.obstacles) ok = ok && !polygons_overlap(p, q);
        if (!ok) continue;
        m.obstacles.push_back(std::move(p));
    }
    validate_map(m);
    return m;
}

MapFile scattered_map(std::uint64_t seed, int count, Rect bounds) {
    SplitMix64 rng(SplitMix64::mix(seed + 0x77));
    MapFile m;
    m.name = "scattered-" + std::to_string(seed);
    m.bounds = bounds;
    while (static_cast<int>(m.obstacles.size()) < count) {
        const double r = rng.uniform(1.0, 4.0);
        const Vec2 c{rng.uniform(bounds.min_x + r + 1, bounds.max_x - r - 1),
                     rng.uniform(bounds.min_y + r + 1, bounds.max_y - r - 1)};
        Polygon p;
        const int n = 3 + static_cast<int>(rng.below(5));
        const double phase = rng.uniform(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            const double a = 2.0 * std::numbers::pi * (i + phase) / n;
            p.vertices.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
        }
        bool ok = true;
        for (const auto &q : m.obstacles) ok = ok && !polygons_overlap(p, q);
        if (ok) m.obstacles.push_back(std::move(p));
    }
    validate_map(m);
    return m;
}

PathNetwork random_network(std::uint64_t seed, int n, double p, double side) {
    SplitMix64 rng(SplitMix64::mix(seed + 0x99));
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(0, side), rng.uniform(0, side)});
    std::vector<std::pair<int, int>> arcs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.unit() < p) arcs.push_back({i, j});
        }
    }
    return PathNetwork(std::move(pts), std::move(arcs));
}

} // namespace arena::testing
