#include "arena/navmesh.hpp"

#include "arena/map.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace arena {

namespace {

using Ring = std::vector<int>;

struct Pool {
    std::vector<Vec2> pts;

    int intern(Vec2 p) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (nearly_equal(pts[i], p)) return static_cast<int>(i);
        }
        pts.push_back(p);
        return static_cast<int>(pts.size() - 1);
    }
    Vec2 operator[](int i) const { return pts[static_cast<std::size_t>(i)]; }
};

struct Edge {
    int u = 0;
    int v = 0;
};

std::uint64_t edge_key(int u, int v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v);
}

double ring_area(const Ring &ring, const Pool &pool) {
    double s = 0.0;
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
        s += cross(pool[ring[i]], pool[ring[(i + 1) % n]]);
    }
    return 0.5 * s;
}

Polygon ring_polygon(const Ring &ring, const Pool &pool) {
    Polygon p;
    p.vertices.reserve(ring.size());
    for (int id : ring) p.vertices.push_back(pool[id]);
    return p;
}

// Directed boundary edges with navigable space on the left: bounds CCW,
// obstacles CW.
std::vector<Edge> raw_edges(const Terrain &t, Pool &pool) {
    std::vector<Edge> edges;
    auto add = [&](const std::vector<Vec2> &pts) {
        std::vector<int> ids;
        for (auto p : pts) {
            const int id = pool.intern(p);
            if (ids.empty() || ids.back() != id) ids.push_back(id);
        }
        while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
        if (ids.size() < 2) return;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            edges.push_back({ids[i], ids[(i + 1) % ids.size()]});
        }
    };
    const Rect &b = t.bounds;
    add({{b.min_x, b.min_y}, {b.max_x, b.min_y}, {b.max_x, b.max_y}, {b.min_x, b.max_y}});
    for (const auto &poly : t.obstacles) {
        std::vector<Vec2> rev(poly.vertices.rbegin(), poly.vertices.rend());
        if (signed_area(Polygon{rev}) > 0.0) std::reverse(rev.begin(), rev.end());
        add(rev);
    }
    return edges;
}

std::vector<Edge> split_at_vertices(const std::vector<Edge> &edges, const Pool &pool) {
    std::vector<Edge> out;
    for (const auto &e : edges) {
        const Segment s{pool[e.u], pool[e.v]};
        const Vec2 d = s.b - s.a;
        const double len2 = dot(d, d);
        std::vector<std::pair<double, int>> inner;
        for (int w = 0; w < static_cast<int>(pool.pts.size()); ++w) {
            if (w == e.u || w == e.v) continue;
            const Vec2 p = pool[w];
            if (point_segment_distance(p, s) > kEpsilon) continue;
            const double t = dot(p - s.a, d) / len2;
            if (t > 0.0 && t < 1.0) inner.push_back({t, w});
        }
        std::sort(inner.begin(), inner.end());
        int prev = e.u;
        for (auto [t, w] : inner) {
            if (w != prev) out.push_back({prev, w});
            prev = w;
        }
        if (prev != e.v) out.push_back({prev, e.v});
    }
    return out;
}

// Opposite coincident edges bound zero-width regions (shared walls); drop them.
std::vector<Edge> cancel_opposites(const std::vector<Edge> &edges) {
    std::map<std::pair<int, int>, int> count;
    for (const auto &e : edges) ++count[{e.u, e.v}];
    for (auto &[k, c] : count) {
        if (k.first > k.second) continue;
        auto it = count.find({k.second, k.first});
        if (it == count.end()) continue;
        const int m = std::min(c, it->second);
        c -= m;
        it->second -= m;
    }
    std::vector<Edge> out;
    for (const auto &[k, c] : count) {
        for (int i = 0; i < c; ++i) out.push_back({k.first, k.second});
    }
    return out;
}

// Clockwise angle from r to d in (0, 2pi].
double cw_angle(Vec2 r, Vec2 d) {
    double phi = std::atan2(cross(r, d), dot(r, d));
    double a = -phi;
    if (a <= 0.0) a += 2.0 * std::numbers::pi;
    return a;
}

std::vector<Ring> chain_rings(const std::vector<Edge> &edges, const Pool &pool) {
    std::vector<std::vector<int>> out(pool.pts.size());
    for (std::size_t i = 0; i < edges.size(); ++i) out[static_cast<std::size_t>(edges[i].u)].push_back(static_cast<int>(i));
    std::vector<char> used(edges.size(), 0);
    std::vector<Ring> rings;
    for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
        if (used[e0]) continue;
        used[e0] = 1;
        Ring ring;
        std::size_t e = e0;
        for (std::size_t guard = 0; guard <= edges.size(); ++guard) {
            ring.push_back(edges[e].u);
            const int v = edges[e].v;
            const Vec2 r = pool[edges[e].u] - pool[v];
            int best = -1;
            double best_angle = 0.0;
            auto consider = [&](int cand) {
                const double a = cw_angle(r, pool[edges[static_cast<std::size_t>(cand)].v] - pool[v]);
                if (best < 0 || a < best_angle) {
                    best = cand;
                    best_angle = a;
                }
            };
            for (int cand : out[static_cast<std::size_t>(v)]) {
                if (!used[static_cast<std::size_t>(cand)]) consider(cand);
            }
            if (edges[e0].u == v) consider(static_cast<int>(e0));
            if (best < 0) throw std::logic_error("navmesh: open boundary chain");
            if (best == static_cast<int>(e0)) break;
            used[static_cast<std::size_t>(best)] = 1;
            e = static_cast<std::size_t>(best);
        }
        rings.push_back(std::move(ring));
    }
    return rings;
}

// Is q strictly inside the interior wedge at ring[i] (interior on the left)?
bool in_cone(const Ring &ring, std::size_t i, Vec2 q, const Pool &pool) {
    const std::size_t n = ring.size();
    const Vec2 o = pool[ring[i]];
    const Vec2 dp = pool[ring[(i + n - 1) % n]] - o;
    const Vec2 dn = pool[ring[(i + 1) % n]] - o;
    const Vec2 dq = q - o;
    const double turn = cross(dp * -1.0, dn);
    if (turn > 0.0) {
        return cross(dn, dq) > 0.0 && cross(dq, dp) > 0.0;
    }
    if (turn < 0.0) {
        return !(cross(dp, dq) >= 0.0 && cross(dq, dn) >= 0.0);
    }
    if (dot(dn, dp) < 0.0) {
        return cross(dn, dq) > 0.0;
    }
    return !(cross(dn, dq) == 0.0 && dot(dn, dq) > 0.0);
}

struct Obstruction {
    std::vector<Segment> edges;
    std::vector<Vec2> vertices;

    void add_ring(const Ring &ring, const Pool &pool) {
        for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
            edges.push_back({pool[ring[i]], pool[ring[(i + 1) % n]]});
            vertices.push_back(pool[ring[i]]);
        }
    }

    bool blocks(const Segment &s) const {
        const Rect box = bounding_box(s).inflated(kEpsilon);
        for (const auto &e : edges) {
            if (!box.overlaps(bounding_box(e), 0.0)) continue;
            if (segments_cross_properly(s, e)) return true;
        }
        for (auto w : vertices) {
            if (!box.contains(w, 0.0)) continue;
            if (nearly_equal(w, s.a) || nearly_equal(w, s.b)) continue;
            if (point_segment_distance(w, s) <= kEpsilon) return true;
        }
        return false;
    }
};

// Splice each hole into its outer ring through a bridge edge, rightmost hole first.
Ring bridge_holes(Ring outer, std::vector<Ring> holes, const Pool &pool) {
    auto max_x = [&](const Ring &r) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < r.size(); ++i) {
            const Vec2 p = pool[r[i]];
            const Vec2 q = pool[r[best]];
            if (p.x > q.x || (p.x == q.x && p.y > q.y)) best = i;
        }
        return best;
    };
    std::stable_sort(holes.begin(), holes.end(), [&](const Ring &a, const Ring &b) {
        return pool[a[max_x(a)]].x > pool[b[max_x(b)]].x;
    });
    for (std::size_t h = 0; h < holes.size(); ++h) {
        const Ring &hole = holes[h];
        Obstruction obs;
        obs.add_ring(outer, pool);
        for (std::size_t k = h; k < holes.size(); ++k) obs.add_ring(holes[k], pool);

        auto try_vertex = [&](std::size_t hv) -> std::optional<std::size_t> {
            const Vec2 hp = pool[hole[hv]];
            std::vector<std::pair<double, std::size_t>> order;
            for (std::size_t o = 0; o < outer.size(); ++o) {
                order.push_back({distance(hp, pool[outer[o]]), o});
            }
            std::stable_sort(order.begin(), order.end(),
                             [](const auto &a, const auto &b) { return a.first < b.first; });
            for (auto [d, o] : order) {
                const Vec2 op = pool[outer[o]];
                if (d <= kEpsilon) continue;
                if (!in_cone(outer, o, hp, pool) || !in_cone(hole, hv, op, pool)) continue;
                if (obs.blocks({hp, op})) continue;
                return o;
            }
            return std::nullopt;
        };

        std::size_t hv = max_x(hole);
        auto o = try_vertex(hv);
        for (std::size_t alt = 0; !o && alt < hole.size(); ++alt) {
            hv = alt;
            o = try_vertex(alt);
        }
        if (!o) throw std::logic_error("navmesh: no bridge for hole");
        Ring merged(outer.begin(), outer.begin() + static_cast<std::ptrdiff_t>(*o) + 1);
        for (std::size_t k = 0; k <= hole.size(); ++k) merged.push_back(hole[(hv + k) % hole.size()]);
        merged.insert(merged.end(), outer.begin() + static_cast<std::ptrdiff_t>(*o), outer.end());
        outer = std::move(merged);
    }
    return outer;
}

bool in_closed_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    if (orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0) return true;
    return point_segment_distance(p, {a, b}) <= kEpsilon || point_segment_distance(p, {b, c}) <= kEpsilon ||
           point_segment_distance(p, {c, a}) <= kEpsilon;
}

double offset_from_line(Vec2 a, Vec2 b, Vec2 c) {
    const double base = distance(a, c);
    if (base <= 0.0) return 0.0;
    return orient(a, b, c) / base;
}

std::vector<std::array<int, 3>> ear_clip(Ring ring, const Pool &pool, const Terrain &terrain) {
    std::vector<std::array<int, 3>> tris;
    auto strip_duplicates = [&]() {
        bool changed = true;
        while (changed && ring.size() >= 3) {
            changed = false;
            for (std::size_t i = 0; i < ring.size(); ++i) {
                const std::size_t j = (i + 1) % ring.size();
                if (ring[i] == ring[j]) {
                    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                    break;
                }
            }
        }
    };
    auto is_ear = [&](std::size_t i) {
        const std::size_t n = ring.size();
        const std::size_t ia = (i + n - 1) % n;
        const std::size_t ic = (i + 1) % n;
        const Vec2 a = pool[ring[ia]];
        const Vec2 b = pool[ring[i]];
        const Vec2 c = pool[ring[ic]];
        if (offset_from_line(a, b, c) <= kEpsilon) return false;
        Rect box{std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y}), std::max({a.x, b.x, c.x}),
                 std::max({a.y, b.y, c.y})};
        box = box.inflated(kEpsilon);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == ia || j == i || j == ic) continue;
            const int id = ring[j];
            if (id == ring[ia] || id == ring[i] || id == ring[ic]) continue;
            const Vec2 w = pool[id];
            if (!box.contains(w, 0.0)) continue;
            if (in_closed_triangle(w, a, b, c)) return false;
        }
        const Segment diag{a, c};
        const Rect dbox = bounding_box(diag).inflated(kEpsilon);
        for (std::size_t j = 0; j < n; ++j) {
            const Segment e{pool[ring[j]], pool[ring[(j + 1) % n]]};
            if (!dbox.overlaps(bounding_box(e), 0.0)) continue;
            if (segments_cross_properly(diag, e)) return false;
        }
        if (!in_cone(ring, ia, c, pool) || !in_cone(ring, ic, a, pool)) return false;
        const Vec2 g = (a + b + c) / 3.0;
        for (const auto &obs : terrain.obstacles) {
            if (point_strictly_inside(g, obs)) return false;
        }
        return true;
    };
    auto remove_degenerate = [&]() {
        const std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = pool[ring[(i + n - 1) % n]];
            const Vec2 b = pool[ring[i]];
            const Vec2 c = pool[ring[(i + 1) % n]];
            if (std::abs(offset_from_line(a, b, c)) <= kEpsilon || nearly_equal(a, c)) {
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
                strip_duplicates();
                return true;
            }
        }
        return false;
    };

    strip_duplicates();
    std::size_t i = 0;
    std::size_t since = 0;
    while (ring.size() > 3) {
        if (since > ring.size()) {
            if (!remove_degenerate()) throw std::logic_error("navmesh: ear clipping stalled");
            since = 0;
            continue;
        }
        i %= ring.size();
        if (is_ear(i)) {
            const std::size_t n = ring.size();
            tris.push_back({ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]});
            ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
            i = (i + ring.size() - 1) % ring.size();
            since = 0;
            strip_duplicates();
        } else {
            ++i;
            ++since;
        }
    }
    if (ring.size() == 3 && offset_from_line(pool[ring[0]], pool[ring[1]], pool[ring[2]]) > kEpsilon) {
        tris.push_back({ring[0], ring[1], ring[2]});
    }
    return tris;
}

// Insert vertices lying on cell edges so neighbouring cells share exact edges.
std::vector<Ring> fix_t_junctions(const std::vector<std::array<int, 3>> &tris, const Pool &pool) {
    std::vector<int> used;
    for (const auto &t : tris) used.insert(used.end(), t.begin(), t.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<Ring> cells;
    for (const auto &t : tris) {
        Ring cell;
        for (int k = 0; k < 3; ++k) {
            const int u = t[static_cast<std::size_t>(k)];
            const int v = t[static_cast<std::size_t>((k + 1) % 3)];
            cell.push_back(u);
            const Segment s{pool[u], pool[v]};
            const Vec2 d = s.b - s.a;
            const Rect box = bounding_box(s).inflated(kEpsilon);
            std::vector<std::pair<double, int>> inner;
            for (int w : used) {
                if (w == u || w == v) continue;
                const Vec2 p = pool[w];
                if (!box.contains(p, 0.0) || point_segment_distance(p, s) > kEpsilon) continue;
                const double tt = dot(p - s.a, d) / dot(d, d);
                if (tt > 0.0 && tt < 1.0) inner.push_back({tt, w});
            }
            std::sort(inner.begin(), inner.end());
            for (auto [tt, w] : inner) cell.push_back(w);
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::optional<Ring> merge_cells(const Ring &x, const Ring &y, const Pool &pool) {
    const std::size_t nx = x.size();
    const std::size_t ny = y.size();
    std::unordered_map<std::uint64_t, std::size_t> y_edges;
    for (std::size_t j = 0; j < ny; ++j) y_edges[edge_key(y[j], y[(j + 1) % ny])] = j;
    std::vector<char> shared(nx, 0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < nx; ++i) {
        if (y_edges.count(edge_key(x[(i + 1) % nx], x[i]))) {
            shared[i] = 1;
            ++count;
        }
    }
    if (count == 0 || count >= nx) return std::nullopt;
    std::size_t start = nx;
    for (std::size_t i = 0; i < nx; ++i) {
        if (shared[i] && !shared[(i + nx - 1) % nx]) {
            if (start != nx) return std::nullopt; // more than one shared run
            start = i;
        }
    }
    if (start == nx) return std::nullopt;
    const int s = x[start];
    const int e = x[(start + count) % nx];
    Ring merged;
    for (std::size_t k = 0; k <= nx - count; ++k) merged.push_back(x[(start + count + k) % nx]);
    std::size_t ys = ny;
    for (std::size_t j = 0; j < ny; ++j) {
        if (y[j] == s) ys = j;
    }
    if (ys == ny) return std::nullopt;
    for (std::size_t k = 1; k < ny; ++k) {
        const int id = y[(ys + k) % ny];
        if (id == e) break;
        merged.push_back(id);
    }
    if (merged.size() < 3) return std::nullopt;
    const Polygon poly = ring_polygon(merged, pool);
    if (signed_area(poly) <= 0.0 || !is_convex(poly)) return std::nullopt;
    return merged;
}

std::vector<Ring> hertel_mehlhorn(std::vector<Ring> cells, const Pool &pool) {
    std::vector<char> alive(cells.size(), 1);
    std::unordered_map<std::uint64_t, int> owner;
    auto index_cell = [&](int c, bool insert) {
        const Ring &r = cells[static_cast<std::size_t>(c)];
        for (std::size_t i = 0, n = r.size(); i < n; ++i) {
            const auto key = edge_key(r[i], r[(i + 1) % n]);
            if (insert) {
                owner[key] = c;
            } else {
                owner.erase(key);
            }
        }
    };
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) index_cell(c, true);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int x = 0; x < static_cast<int>(cells.size()); ++x) {
            if (!alive[static_cast<std::size_t>(x)]) continue;
            for (std::size_t i = 0; i < cells[static_cast<std::size_t>(x)].size(); ++i) {
                const Ring &rx = cells[static_cast<std::size_t>(x)];
                const auto it = owner.find(edge_key(rx[(i + 1) % rx.size()], rx[i]));
                if (it == owner.end() || it->second == x) continue;
                const int y = it->second;
                auto merged = merge_cells(rx, cells[static_cast<std::size_t>(y)], pool);
                if (!merged) continue;
                index_cell(x, false);
                index_cell(y, false);
                cells[static_cast<std::size_t>(x)] = std::move(*merged);
                cells[static_cast<std::size_t>(y)].clear();
                alive[static_cast<std::size_t>(y)] = 0;
                index_cell(x, true);
                changed = true;
                i = static_cast<std::size_t>(-1);
            }
        }
    }
    std::vector<Ring> out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (alive[c]) out.push_back(std::move(cells[c]));
    }
    return out;
}

} // namespace

std::optional<int> NavMesh::locate(Vec2 p) const {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (point_in_polygon(p, cells[i])) return static_cast<int>(i);
    }
    return std::nullopt;
}

std::vector<int> NavMesh::neighbors(int cell) const {
    std::vector<int> out;
    for (const auto &adj : adjacency) {
        if (adj.a == cell) out.push_back(adj.b);
        if (adj.b == cell) out.push_back(adj.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

NavMesh build_navmesh(const Terrain &terrain) {
    NavMesh mesh;
    if (!(terrain.bounds.width() > 0.0) || !(terrain.bounds.height() > 0.0)) return mesh;
    Pool pool;
    auto edges = cancel_opposites(split_at_vertices(raw_edges(terrain, pool), pool));
    auto rings = chain_rings(edges, pool);

    std::vector<Ring> outers;
    std::vector<Ring> holes;
    for (auto &r : rings) {
        const double a = ring_area(r, pool);
        if (a > kEpsilon) {
            outers.push_back(std::move(r));
        } else if (a < -kEpsilon) {
            holes.push_back(std::move(r));
        }
    }
    std::vector<std::vector<Ring>> assigned(outers.size());
    for (auto &h : holes) {
        int best = -1;
        double best_area = 0.0;
        for (std::size_t o = 0; o < outers.size(); ++o) {
            const Polygon poly = ring_polygon(outers[o], pool);
            bool inside = false;
            for (int id : h) {
                if (point_strictly_inside(pool[id], poly)) {
                    inside = true;
                    break;
                }
            }
            if (!inside) continue;
            const double a = ring_area(outers[o], pool);
            if (best < 0 || a < best_area) {
                best = static_cast<int>(o);
                best_area = a;
            }
        }
        if (best >= 0) assigned[static_cast<std::size_t>(best)].push_back(std::move(h));
    }

    std::vector<std::array<int, 3>> tris;
    for (std::size_t o = 0; o < outers.size(); ++o) {
        Ring merged = bridge_holes(std::move(outers[o]), std::move(assigned[o]), pool);
        auto t = ear_clip(std::move(merged), pool, terrain);
        tris.insert(tris.end(), t.begin(), t.end());
    }
    auto cells = hertel_mehlhorn(fix_t_junctions(tris, pool), pool);

    std::unordered_map<std::uint64_t, int> owner;
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
        const Ring &r = cells[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < r.size(); ++i) owner[edge_key(r[i], r[(i + 1) % r.size()])] = c;
        mesh.cells.push_back(ring_polygon(r, pool));
    }
    std::map<std::pair<int, int>, std::vector<Vec2>> shared;
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
        const Ring &r = cells[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < r.size(); ++i) {
            const int u = r[i];
            const int v = r[(i + 1) % r.size()];
            auto it = owner.find(edge_key(v, u));
            if (it == owner.end() || it->second <= c) continue;
            auto &pts = shared[{c, it->second}];
            pts.push_back(pool[u]);
            pts.push_back(pool[v]);
        }
    }
    for (const auto &[key, pts] : shared) {
        Segment best{pts[0], pts[1]};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                if (distance(pts[i], pts[j]) > best.length()) best = {pts[i], pts[j]};
            }
        }
        if (lex_less(best.b, best.a)) std::swap(best.a, best.b);
        mesh.adjacency.push_back({key.first, key.second, best});
    }
    return mesh;
}

PathNetwork::PathNetwork(std::vector<Vec2> waypoints, std::vector<std::pair<int, int>> arcs)
    : waypoints_(std::move(waypoints)) {
    const int n = static_cast<int>(waypoints_.size());
    for (auto &[a, b] : arcs) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("arc index out of range");
        if (a == b) throw std::invalid_argument("self-loop arc");
        if (a > b) std::swap(a, b);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    std::vector<std::size_t> degree(waypoints_.size(), 0);
    for (auto [a, b] : arcs) {
        arcs_.push_back({a, b, distance(waypoints_[static_cast<std::size_t>(a)], waypoints_[static_cast<std::size_t>(b)])});
        ++degree[static_cast<std::size_t>(a)];
        ++degree[static_cast<std::size_t>(b)];
    }
    offsets_.assign(waypoints_.size() + 1, 0);
    for (std::size_t i = 0; i < waypoints_.size(); ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t k = 0; k < arcs_.size(); ++k) {
        const auto &arc = arcs_[k];
        adjacency_[fill[static_cast<std::size_t>(arc.a)]++] = {arc.b, static_cast<int>(k)};
        adjacency_[fill[static_cast<std::size_t>(arc.b)]++] = {arc.a, static_cast<int>(k)};
    }
    for (std::size_t i = 0; i < waypoints_.size(); ++i) {
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]),
                  [](const Neighbor &l, const Neighbor &r) { return l.node < r.node; });
    }
}

std::span<const PathNetwork::Neighbor> PathNetwork::neighbors(int node) const {
    if (offsets_.empty()) return {};
    const auto i = static_cast<std::size_t>(node);
    return std::span<const Neighbor>(adjacency_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::optional<int> PathNetwork::find_arc(int a, int b) const {
    for (const auto &nb : neighbors(a)) {
        if (nb.node == b) return nb.arc;
    }
    return std::nullopt;
}

namespace {

std::vector<std::pair<int, int>> visible_pairs(const Terrain &terrain, std::span<const Vec2> pts, double clearance,
                                               const LineOfSight *los) {
    std::vector<std::pair<int, int>> arcs;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const bool ok = los ? los->clear(pts[i], pts[j], clearance) : clear_line(pts[i], pts[j], terrain, clearance);
            if (ok) arcs.push_back({static_cast<int>(i), static_cast<int>(j)});
        }
    }
    return arcs;
}

} // namespace

PathNetwork place_pathnodes(const NavMesh &mesh, const Terrain &terrain, double clearance, const LineOfSight *los) {
    std::vector<Vec2> waypoints;
    for (const auto &adj : mesh.adjacency) {
        if (adj.edge.length() + kEpsilon < 2.0 * clearance) continue;
        const Vec2 m = adj.edge.midpoint();
        if (!clear_line(m, m, terrain, clearance)) continue;
        waypoints.push_back(m);
    }
    auto arcs = visible_pairs(terrain, waypoints, clearance, los);
    return PathNetwork(std::move(waypoints), std::move(arcs));
}

PathNetwork connect_waypoints(const Terrain &terrain, std::span<const Vec2> waypoints, double clearance,
                              const LineOfSight *los) {
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        if (!is_finite(waypoints[i]) || !is_navigable(waypoints[i], terrain)) {
            throw ValidationError("waypoint.navigable", "waypoint[" + std::to_string(i) + "] is not in navigable space");
        }
    }
    auto arcs = visible_pairs(terrain, waypoints, clearance, los);
    return PathNetwork(std::vector<Vec2>(waypoints.begin(), waypoints.end()), std::move(arcs));
}

using nlohmann::json;

namespace {

json pt(Vec2 p) { return json::array({p.x, p.y}); }

Vec2 read_pt(const json &j) {
    if (!j.is_array() || j.size() != 2) throw ValidationError("schema.point", "expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string navmesh_to_json(const NavMesh &mesh) {
    json cells = json::array();
    for (const auto &c : mesh.cells) {
        json poly = json::array();
        for (auto v : c.vertices) poly.push_back(pt(v));
        cells.push_back(poly);
    }
    json adj = json::array();
    for (const auto &a : mesh.adjacency) {
        adj.push_back({{"a", a.a}, {"b", a.b}, {"edge", json::array({pt(a.edge.a), pt(a.edge.b)})}});
    }
    return json{{"cells", cells}, {"adjacency", adj}}.dump();
}

NavMesh navmesh_from_json(const std::string &text) {
    const json j = json::parse(text);
    NavMesh mesh;
    for (const auto &c : j.at("cells")) {
        Polygon poly;
        for (const auto &v : c) poly.vertices.push_back(read_pt(v));
        mesh.cells.push_back(std::move(poly));
    }
    for (const auto &a : j.at("adjacency")) {
        mesh.adjacency.push_back(
            {a.at("a").get<int>(), a.at("b").get<int>(), {read_pt(a.at("edge")[0]), read_pt(a.at("edge")[1])}});
    }
    return mesh;
}

std::string network_to_json(const PathNetwork &net, double clearance) {
    json wps = json::array();
    for (auto w : net.waypoints()) wps.push_back(pt(w));
    json arcs = json::array();
    for (const auto &a : net.arcs()) arcs.push_back(json::array({a.a, a.b, a.length}));
    return json{{"clearance", clearance}, {"waypoints", wps}, {"arcs", arcs}}.dump();
}

PathNetwork network_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ValidationError("schema.json", e.what());
    }
    std::vector<Vec2> wps;
    for (const auto &w : j.at("waypoints")) wps.push_back(read_pt(w));
    std::vector<std::pair<int, int>> arcs;
    for (const auto &a : j.value("arcs", json::array())) arcs.push_back({a.at(0).get<int>(), a.at(1).get<int>()});
    return PathNetwork(std::move(wps), std::move(arcs));
}

std::vector<Vec2> waypoints_from_json(const std::string &text) {
    const json j = json::parse(text);
    const json &arr = j.is_object() ? j.at("waypoints") : j;
    std::vector<Vec2> out;
    for (const auto &w : arr) out.push_back(read_pt(w));
    return out;
}

} // namespace arena
