#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace arena {

/// Single geometric tolerance for coincidence tests, in world units.
inline constexpr double kEpsilon = 1e-6;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 &operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Vec2 &operator-=(Vec2 o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 v) { return std::sqrt(dot(v, v)); }
inline double distance(Vec2 a, Vec2 b) { return length(b - a); }
constexpr Vec2 perpendicular(Vec2 v) { return {-v.y, v.x}; }
Vec2 normalized(Vec2 v);
bool is_finite(Vec2 v);

/// Lexicographic order, used to canonicalise segment direction.
constexpr bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

/// cross(b - a, c - a): positive for a counter-clockwise turn.
constexpr double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

inline bool nearly_equal(Vec2 a, Vec2 b, double eps = kEpsilon) {
    return std::abs(a.x - b.x) <= eps && std::abs(a.y - b.y) <= eps;
}

struct Segment {
    Vec2 a;
    Vec2 b;

    double length() const { return distance(a, b); }
    Vec2 midpoint() const { return (a + b) * 0.5; }
    friend constexpr bool operator==(const Segment &, const Segment &) = default;
};

/// Axis-aligned rectangle, closed.
struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double area() const { return width() * height(); }
    Vec2 center() const { return {(min_x + max_x) * 0.5, (min_y + max_y) * 0.5}; }
    bool contains(Vec2 p, double eps = kEpsilon) const {
        return p.x >= min_x - eps && p.x <= max_x + eps && p.y >= min_y - eps && p.y <= max_y + eps;
    }
    bool overlaps(const Rect &o, double eps = kEpsilon) const {
        return min_x <= o.max_x + eps && o.min_x <= max_x + eps && min_y <= o.max_y + eps &&
               o.min_y <= max_y + eps;
    }
    Rect inflated(double r) const { return {min_x - r, min_y - r, max_x + r, max_y + r}; }
    friend constexpr bool operator==(const Rect &, const Rect &) = default;
};

/// Simple polygon; vertices are kept counter-clockwise by the loaders.
struct Polygon {
    std::vector<Vec2> vertices;

    std::size_t size() const { return vertices.size(); }
    Segment edge(std::size_t i) const { return {vertices[i], vertices[(i + 1) % vertices.size()]}; }
    friend bool operator==(const Polygon &, const Polygon &) = default;
};

Polygon rectangle(const Rect &r);

double signed_area(const Polygon &poly);
double area(const Polygon &poly);
Vec2 centroid(const Polygon &poly);
Rect bounding_box(const Polygon &poly);
Rect bounding_box(const Segment &s);
void make_ccw(Polygon &poly);

/// True iff the polygon has no repeated vertices and no two non-adjacent edges touch.
bool is_simple(const Polygon &poly);

/// True iff every turn has the same sign or is (within tolerance) straight.
bool is_convex(const Polygon &poly);

double point_segment_distance(Vec2 p, const Segment &s);
Vec2 closest_point(Vec2 p, const Segment &s);
double segment_distance(const Segment &s1, const Segment &s2);

/// Closed segments share a point (within kEpsilon); collinear overlap counts.
bool segments_intersect(const Segment &s1, const Segment &s2);

/// Segments cross at a single point interior to both (strict sign test).
bool segments_cross_properly(const Segment &s1, const Segment &s2);

double boundary_distance(Vec2 p, const Polygon &poly);

/// Closed containment: interior or boundary (within kEpsilon).
bool point_in_polygon(Vec2 p, const Polygon &poly);

/// Open containment: inside and farther than kEpsilon from the boundary.
bool point_strictly_inside(Vec2 p, const Polygon &poly);

/// Area of the intersection of a simple polygon with a rectangle.
double clipped_area(const Polygon &poly, const Rect &r);

/// Static terrain: world bounds plus closed obstacle polygons.
struct Terrain {
    Rect bounds;
    std::vector<Polygon> obstacles;
};

/// The capsule of radius `clearance` around a-b stays inside `bounds`.
bool capsule_in_bounds(const Rect &bounds, Vec2 a, Vec2 b, double clearance);

/// The capsule around a-b meets the obstacle interior. Direction-independent.
bool polygon_blocks(const Polygon &obstacle, Vec2 a, Vec2 b, double clearance);

/// A thin wall (closed gate) blocks the capsule: touching or closer than the clearance.
bool wall_blocks(const Segment &wall, Vec2 a, Vec2 b, double clearance);

/// Capsule of radius `clearance` around a-b is inside bounds, meets no obstacle
/// interior and no wall segment.
bool clear_line(Vec2 a, Vec2 b, std::span<const Polygon> obstacles, const Rect &bounds,
                double clearance, std::span<const Segment> walls = {});
bool clear_line(Vec2 a, Vec2 b, const Terrain &terrain, double clearance,
                std::span<const Segment> walls = {});

/// Inside bounds and not strictly inside any obstacle.
bool is_navigable(Vec2 p, const Terrain &terrain);

} // namespace arena
