#include "arena/map.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace arena {

using nlohmann::json;

namespace {

Vec2 parse_point(const json &j, const std::string &where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ValidationError("schema.point", where + " must be [x, y]");
    }
    Vec2 p{j[0].get<double>(), j[1].get<double>()};
    if (!is_finite(p)) {
        throw ValidationError("schema.finite", where + " must be finite");
    }
    return p;
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

std::vector<Vec2> parse_points(const json &j, const std::string &where) {
    std::vector<Vec2> out;
    if (!j.is_array()) {
        throw ValidationError("schema.array", where + " must be an array");
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(parse_point(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

TeamLayout parse_team(const json &j, const std::string &where) {
    TeamLayout t;
    if (!j.contains("base")) {
        throw ValidationError("schema.team_base", where + " needs a base");
    }
    t.base = parse_point(j.at("base"), where + ".base");
    if (j.contains("towers")) t.towers = parse_points(j.at("towers"), where + ".towers");
    if (j.contains("hero")) t.hero_spawn = parse_point(j.at("hero"), where + ".hero");
    return t;
}

json team_json(const TeamLayout &t) {
    json j;
    j["base"] = point_json(t.base);
    json towers = json::array();
    for (auto p : t.towers) towers.push_back(point_json(p));
    j["towers"] = towers;
    if (t.hero_spawn) j["hero"] = point_json(*t.hero_spawn);
    return j;
}

Vec2 interior_point(const Polygon &poly) {
    const Vec2 c = centroid(poly);
    if (point_strictly_inside(c, poly)) return c;
    const auto &v = poly.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Vec2 t = (v[(i + n - 1) % n] + v[i] + v[(i + 1) % n]) / 3.0;
        if (point_strictly_inside(t, poly)) return t;
    }
    return c;
}

void check_navigable(Vec2 p, const MapFile &map, const std::string &rule, const std::string &what) {
    if (!is_navigable(p, map.terrain())) {
        throw ValidationError(rule, what + " is not in navigable space");
    }
}

} // namespace

bool polygons_overlap(const Polygon &a, const Polygon &b) {
    if (!bounding_box(a).overlaps(bounding_box(b), 0.0)) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (segments_cross_properly(a.edge(i), b.edge(j))) return true;
        }
    }
    auto any_inside = [](const Polygon &p, const Polygon &q) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (point_strictly_inside(p.vertices[i], q) || point_strictly_inside(p.edge(i).midpoint(), q)) {
                return true;
            }
        }
        return point_strictly_inside(interior_point(p), q);
    };
    return any_inside(a, b) || any_inside(b, a);
}

void validate_map(const MapFile &map) {
    const Rect &b = map.bounds;
    if (!(b.width() > 0.0) || !(b.height() > 0.0)) {
        throw ValidationError("bounds.positive_area", "bounds must have positive width and height");
    }
    for (std::size_t i = 0; i < map.obstacles.size(); ++i) {
        const auto &poly = map.obstacles[i];
        const std::string where = "obstacle[" + std::to_string(i) + "]";
        if (poly.size() < 3) throw ValidationError("obstacle.min_vertices", where + " needs at least 3 vertices");
        if (std::abs(signed_area(poly)) <= kEpsilon) throw ValidationError("obstacle.nonzero_area", where + " has zero area");
        if (!is_simple(poly)) throw ValidationError("obstacle.simple", where + " is self-intersecting");
        for (auto v : poly.vertices) {
            if (!b.contains(v)) throw ValidationError("obstacle.inside_bounds", where + " leaves the world bounds");
        }
    }
    for (std::size_t i = 0; i < map.obstacles.size(); ++i) {
        for (std::size_t j = i + 1; j < map.obstacles.size(); ++j) {
            if (polygons_overlap(map.obstacles[i], map.obstacles[j])) {
                throw ValidationError("obstacles.disjoint", "obstacle[" + std::to_string(i) + "] overlaps obstacle[" +
                                                                std::to_string(j) + "]");
            }
        }
    }
    for (std::size_t i = 0; i < map.gates.size(); ++i) {
        const auto &g = map.gates[i];
        const std::string where = "gate[" + std::to_string(i) + "]";
        if (g.segment.length() <= kEpsilon) throw ValidationError("gate.degenerate", where + " has zero length");
        if (g.period_ticks <= 0) throw ValidationError("gate.period_positive", where + " period must be positive");
        if (!b.contains(g.segment.a) || !b.contains(g.segment.b)) {
            throw ValidationError("gate.inside_bounds", where + " leaves the world bounds");
        }
    }
    auto check_team = [&](const std::optional<TeamLayout> &t, const std::string &name) {
        if (!t) return;
        check_navigable(t->base, map, "team.base_navigable", "team " + name + " base");
        for (std::size_t i = 0; i < t->towers.size(); ++i) {
            check_navigable(t->towers[i], map, "team.tower_navigable", "team " + name + " tower[" + std::to_string(i) + "]");
        }
        if (t->hero_spawn) check_navigable(*t->hero_spawn, map, "team.hero_navigable", "team " + name + " hero spawn");
    };
    check_team(map.team_a, "A");
    check_team(map.team_b, "B");
    if (map.team_a.has_value() != map.team_b.has_value()) {
        throw ValidationError("teams.both", "either both teams or neither must be declared");
    }
    for (std::size_t i = 0; i < map.crystals.size(); ++i) {
        check_navigable(map.crystals[i], map, "crystal.navigable", "crystal[" + std::to_string(i) + "]");
    }
    if (map.gatherer_spawn) check_navigable(*map.gatherer_spawn, map, "gatherer.navigable", "gatherer spawn");
    for (std::size_t i = 0; i < map.waypoints.size(); ++i) {
        check_navigable(map.waypoints[i], map, "waypoint.navigable", "waypoint[" + std::to_string(i) + "]");
    }
}

MapFile parse_map(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ValidationError("schema.json", e.what());
    }
    if (!j.is_object()) throw ValidationError("schema.object", "map must be a JSON object");
    MapFile map;
    map.name = j.value("name", std::string{});
    if (!j.contains("bounds") || !j["bounds"].is_array() || j["bounds"].size() != 4) {
        throw ValidationError("schema.bounds", "bounds must be [min_x, min_y, max_x, max_y]");
    }
    const auto &jb = j["bounds"];
    for (const auto &v : jb) {
        if (!v.is_number()) throw ValidationError("schema.bounds", "bounds must be numeric");
    }
    map.bounds = {jb[0].get<double>(), jb[1].get<double>(), jb[2].get<double>(), jb[3].get<double>()};
    if (j.contains("obstacles")) {
        const auto &jo = j["obstacles"];
        if (!jo.is_array()) throw ValidationError("schema.array", "obstacles must be an array");
        for (std::size_t i = 0; i < jo.size(); ++i) {
            Polygon poly{parse_points(jo[i], "obstacles[" + std::to_string(i) + "]")};
            make_ccw(poly);
            map.obstacles.push_back(std::move(poly));
        }
    }
    if (j.contains("gates")) {
        const auto &jg = j["gates"];
        if (!jg.is_array()) throw ValidationError("schema.array", "gates must be an array");
        for (std::size_t i = 0; i < jg.size(); ++i) {
            const std::string where = "gates[" + std::to_string(i) + "]";
            const auto &g = jg[i];
            if (!g.is_object() || !g.contains("a") || !g.contains("b")) {
                throw ValidationError("schema.gate", where + " needs a and b");
            }
            GateSpec spec;
            spec.segment = {parse_point(g["a"], where + ".a"), parse_point(g["b"], where + ".b")};
            spec.period_ticks = g.value("period", 150);
            spec.open = g.value("open", true);
            map.gates.push_back(spec);
        }
    }
    if (j.contains("teams")) {
        const auto &jt = j["teams"];
        if (jt.contains("A")) map.team_a = parse_team(jt["A"], "teams.A");
        if (jt.contains("B")) map.team_b = parse_team(jt["B"], "teams.B");
    }
    if (j.contains("crystals")) map.crystals = parse_points(j["crystals"], "crystals");
    if (j.contains("gatherer")) map.gatherer_spawn = parse_point(j["gatherer"], "gatherer");
    if (j.contains("waypoints")) map.waypoints = parse_points(j["waypoints"], "waypoints");
    validate_map(map);
    return map;
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

MapFile load_map(const std::filesystem::path &path) { return parse_map(read_text_file(path)); }

std::string map_to_json(const MapFile &map) {
    json j;
    j["name"] = map.name;
    j["bounds"] = json::array({map.bounds.min_x, map.bounds.min_y, map.bounds.max_x, map.bounds.max_y});
    json obstacles = json::array();
    for (const auto &poly : map.obstacles) {
        json pts = json::array();
        for (auto p : poly.vertices) pts.push_back(point_json(p));
        obstacles.push_back(pts);
    }
    j["obstacles"] = obstacles;
    json gates = json::array();
    for (const auto &g : map.gates) {
        gates.push_back({{"a", point_json(g.segment.a)}, {"b", point_json(g.segment.b)},
                         {"period", g.period_ticks}, {"open", g.open}});
    }
    j["gates"] = gates;
    if (map.team_a && map.team_b) {
        j["teams"] = {{"A", team_json(*map.team_a)}, {"B", team_json(*map.team_b)}};
    }
    json crystals = json::array();
    for (auto p : map.crystals) crystals.push_back(point_json(p));
    j["crystals"] = crystals;
    if (map.gatherer_spawn) j["gatherer"] = point_json(*map.gatherer_spawn);
    json waypoints = json::array();
    for (auto p : map.waypoints) waypoints.push_back(point_json(p));
    j["waypoints"] = waypoints;
    return j.dump();
}

std::uint64_t map_hash(const MapFile &map) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : map_to_json(map)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace arena
