#include "arena/geometry.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace arena {

Vec2 normalized(Vec2 v) {
    const double len = length(v);
    if (len <= 0.0) {
        return {0.0, 0.0};
    }
    return v / len;
}

bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

Polygon rectangle(const Rect &r) {
    return Polygon{{{r.min_x, r.min_y}, {r.max_x, r.min_y}, {r.max_x, r.max_y}, {r.min_x, r.max_y}}};
}

double signed_area(const Polygon &poly) {
    const auto &v = poly.vertices;
    double twice = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        twice += cross(v[i], v[(i + 1) % n]);
    }
    return twice * 0.5;
}

double area(const Polygon &poly) { return std::abs(signed_area(poly)); }

Vec2 centroid(const Polygon &poly) {
    const auto &v = poly.vertices;
    const double a = signed_area(poly);
    if (std::abs(a) <= 0.0) {
        Vec2 sum;
        for (auto p : v) sum += p;
        return v.empty() ? sum : sum / static_cast<double>(v.size());
    }
    // Shift to the first vertex to keep the products small.
    const Vec2 o = v.front();
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Vec2 p = v[i] - o;
        const Vec2 q = v[(i + 1) % n] - o;
        const double f = cross(p, q);
        cx += (p.x + q.x) * f;
        cy += (p.y + q.y) * f;
    }
    return o + Vec2{cx, cy} / (6.0 * a);
}

Rect bounding_box(const Polygon &poly) {
    Rect r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (auto p : poly.vertices) {
        r.min_x = std::min(r.min_x, p.x);
        r.min_y = std::min(r.min_y, p.y);
        r.max_x = std::max(r.max_x, p.x);
        r.max_y = std::max(r.max_y, p.y);
    }
    return r;
}

Rect bounding_box(const Segment &s) {
    return {std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y), std::max(s.a.x, s.b.x),
            std::max(s.a.y, s.b.y)};
}

void make_ccw(Polygon &poly) {
    if (signed_area(poly) < 0.0) {
        std::reverse(poly.vertices.begin(), poly.vertices.end());
    }
}

Vec2 closest_point(Vec2 p, const Segment &s) {
    const Vec2 d = s.b - s.a;
    const double len2 = dot(d, d);
    if (len2 <= 0.0) {
        return s.a;
    }
    const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    return s.a + d * t;
}

double point_segment_distance(Vec2 p, const Segment &s) { return distance(p, closest_point(p, s)); }

bool segments_cross_properly(const Segment &s1, const Segment &s2) {
    const double o1 = orient(s1.a, s1.b, s2.a);
    const double o2 = orient(s1.a, s1.b, s2.b);
    const double o3 = orient(s2.a, s2.b, s1.a);
    const double o4 = orient(s2.a, s2.b, s1.b);
    return ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) &&
           ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0));
}

double segment_distance(const Segment &s1, const Segment &s2) {
    if (segments_cross_properly(s1, s2)) {
        return 0.0;
    }
    return std::min({point_segment_distance(s1.a, s2), point_segment_distance(s1.b, s2),
                     point_segment_distance(s2.a, s1), point_segment_distance(s2.b, s1)});
}

bool segments_intersect(const Segment &s1, const Segment &s2) {
    return segment_distance(s1, s2) <= kEpsilon;
}

bool is_simple(const Polygon &poly) {
    const auto &v = poly.vertices;
    const std::size_t n = v.size();
    if (n < 3) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (nearly_equal(v[i], v[j])) {
                return false;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Segment ei = poly.edge(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Segment ej = poly.edge(j);
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (!adjacent) {
                if (segments_intersect(ei, ej)) {
                    return false;
                }
                continue;
            }
            // Adjacent edges may only share their common vertex.
            const Vec2 far_i = (j == i + 1) ? ei.a : ei.b;
            const Vec2 far_j = (j == i + 1) ? ej.b : ej.a;
            if (point_segment_distance(far_i, ej) <= kEpsilon ||
                point_segment_distance(far_j, ei) <= kEpsilon) {
                return false;
            }
        }
    }
    return true;
}

bool is_convex(const Polygon &poly) {
    const auto &v = poly.vertices;
    const std::size_t n = v.size();
    if (n < 3) {
        return false;
    }
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = v[(i + n - 1) % n];
        const Vec2 b = v[i];
        const Vec2 c = v[(i + 1) % n];
        const Vec2 e1 = b - a;
        const Vec2 e2 = c - b;
        const double cr = cross(e1, e2);
        const double tol = kEpsilon * std::max(length(e1), length(e2));
        if (cr > tol) {
            pos = true;
        } else if (cr < -tol) {
            neg = true;
        } else if (dot(e1, e2) < 0.0) {
            return false; // spike: the boundary doubles back
        }
    }
    return (pos || neg) && !(pos && neg);
}

double boundary_distance(Vec2 p, const Polygon &poly) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        best = std::min(best, point_segment_distance(p, poly.edge(i)));
    }
    return best;
}

namespace {

bool ray_cast_inside(Vec2 p, const Polygon &poly) {
    const auto &v = poly.vertices;
    bool inside = false;
    for (std::size_t i = 0, n = v.size(), j = n - 1; i < n; j = i++) {
        const Vec2 a = v[i];
        const Vec2 b = v[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

} // namespace

bool point_in_polygon(Vec2 p, const Polygon &poly) {
    if (poly.size() < 3) {
        return false;
    }
    if (boundary_distance(p, poly) <= kEpsilon) {
        return true;
    }
    return ray_cast_inside(p, poly);
}

bool point_strictly_inside(Vec2 p, const Polygon &poly) {
    if (poly.size() < 3) {
        return false;
    }
    if (boundary_distance(p, poly) <= kEpsilon) {
        return false;
    }
    return ray_cast_inside(p, poly);
}

double clipped_area(const Polygon &poly, const Rect &r) {
    std::vector<Vec2> out = poly.vertices;
    auto clip = [&out](auto inside, auto intersect) {
        std::vector<Vec2> in;
        in.swap(out);
        for (std::size_t i = 0, n = in.size(); i < n; ++i) {
            const Vec2 cur = in[i];
            const Vec2 prev = in[(i + n - 1) % n];
            const bool cur_in = inside(cur);
            const bool prev_in = inside(prev);
            if (cur_in) {
                if (!prev_in) out.push_back(intersect(prev, cur));
                out.push_back(cur);
            } else if (prev_in) {
                out.push_back(intersect(prev, cur));
            }
        }
    };
    auto at_x = [](double x) {
        return [x](Vec2 p, Vec2 q) { return Vec2{x, p.y + (q.y - p.y) * (x - p.x) / (q.x - p.x)}; };
    };
    auto at_y = [](double y) {
        return [y](Vec2 p, Vec2 q) { return Vec2{p.x + (q.x - p.x) * (y - p.y) / (q.y - p.y), y}; };
    };
    clip([&](Vec2 p) { return p.x >= r.min_x; }, at_x(r.min_x));
    clip([&](Vec2 p) { return p.x <= r.max_x; }, at_x(r.max_x));
    clip([&](Vec2 p) { return p.y >= r.min_y; }, at_y(r.min_y));
    clip([&](Vec2 p) { return p.y <= r.max_y; }, at_y(r.max_y));
    if (out.size() < 3) {
        return 0.0;
    }
    return std::abs(signed_area(Polygon{std::move(out)}));
}

bool capsule_in_bounds(const Rect &bounds, Vec2 a, Vec2 b, double clearance) {
    const Rect inner = bounds.inflated(-clearance);
    return inner.contains(a) && inner.contains(b);
}

bool polygon_blocks(const Polygon &obstacle, Vec2 a, Vec2 b, double clearance) {
    if (lex_less(b, a)) {
        std::swap(a, b);
    }
    const Segment s{a, b};
    if (!bounding_box(s).inflated(std::max(clearance, 0.0) + kEpsilon).overlaps(bounding_box(obstacle), 0.0)) {
        return false;
    }
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < obstacle.size(); ++i) {
        const Segment e = obstacle.edge(i);
        if (segments_cross_properly(s, e)) {
            return true;
        }
        min_d = std::min(min_d, segment_distance(s, e));
    }
    if (min_d < clearance - kEpsilon) {
        return true;
    }
    if (min_d > kEpsilon) {
        // No boundary contact: the whole segment is on one side.
        return ray_cast_inside(a, obstacle);
    }
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    if (len2 <= 0.0) {
        return point_strictly_inside(a, obstacle);
    }
    // Split at every boundary contact; the open pieces between contacts are
    // either wholly inside or wholly outside.
    std::vector<double> ts{0.0, 1.0};
    for (auto v : obstacle.vertices) {
        if (point_segment_distance(v, s) <= kEpsilon) {
            ts.push_back(std::clamp(dot(v - a, d) / len2, 0.0, 1.0));
        }
    }
    std::sort(ts.begin(), ts.end());
    const double len = std::sqrt(len2);
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if ((ts[i + 1] - ts[i]) * len <= kEpsilon) {
            continue;
        }
        const Vec2 m = a + d * ((ts[i] + ts[i + 1]) * 0.5);
        if (point_strictly_inside(m, obstacle)) {
            return true;
        }
    }
    return false;
}

bool wall_blocks(const Segment &wall, Vec2 a, Vec2 b, double clearance) {
    if (lex_less(b, a)) {
        std::swap(a, b);
    }
    const double d = segment_distance(Segment{a, b}, wall);
    return d <= kEpsilon || d < clearance - kEpsilon;
}

bool clear_line(Vec2 a, Vec2 b, std::span<const Polygon> obstacles, const Rect &bounds, double clearance,
                std::span<const Segment> walls) {
    if (lex_less(b, a)) {
        std::swap(a, b);
    }
    if (!capsule_in_bounds(bounds, a, b, clearance)) {
        return false;
    }
    for (const auto &poly : obstacles) {
        if (polygon_blocks(poly, a, b, clearance)) {
            return false;
        }
    }
    for (const auto &wall : walls) {
        if (wall_blocks(wall, a, b, clearance)) {
            return false;
        }
    }
    return true;
}

bool clear_line(Vec2 a, Vec2 b, const Terrain &terrain, double clearance, std::span<const Segment> walls) {
    return clear_line(a, b, terrain.obstacles, terrain.bounds, clearance, walls);
}

bool is_navigable(Vec2 p, const Terrain &terrain) {
    if (!terrain.bounds.contains(p)) {
        return false;
    }
    return std::none_of(terrain.obstacles.begin(), terrain.obstacles.end(),
                        [p](const Polygon &o) { return point_strictly_inside(p, o); });
}

} // namespace arena
