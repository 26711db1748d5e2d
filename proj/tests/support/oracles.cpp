#include "oracles.hpp"

#include "arena/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

namespace arena::testing {

using nlohmann::json;

std::vector<double> uniform_cost(const PathNetwork &net, int source, const std::function<bool(int)> &blocked) {
    const int n = static_cast<int>(net.size());
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    const auto arcs = net.arcs();
    for (int k = 0; k < static_cast<int>(arcs.size()); ++k) {
        if (blocked && blocked(k)) continue;
        const double w = distance(net.waypoint(arcs[k].a), net.waypoint(arcs[k].b));
        adj[arcs[k].a].push_back({arcs[k].b, w});
        adj[arcs[k].b].push_back({arcs[k].a, w});
    }
    std::vector<double> dist(n, kInf);
    std::vector<char> done(n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[source] = 0.0;
    open.push({0.0, source});
    while (!open.empty()) {
        auto [d, u] = open.top();
        open.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (auto [v, w] : adj[u]) {
            if (d + w < dist[v]) {
                dist[v] = d + w;
                open.push({dist[v], v});
            }
        }
    }
    return dist;
}

double hop_length(const PathNetwork &net, const std::vector<int> &path) {
    double s = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) s += distance(net.waypoint(path[i - 1]), net.waypoint(path[i]));
    return s;
}

// ---- polygons ------------------------------------------------------------------

double shoelace(const std::vector<Vec2> &pts) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 a = pts[i], b = pts[(i + 1) % pts.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return s / 2.0;
}

std::vector<Vec2> convex_intersection(const std::vector<Vec2> &subject, const std::vector<Vec2> &clip) {
    std::vector<Vec2> out = subject;
    const double sign = shoelace(clip) >= 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
        const Vec2 a = clip[i], b = clip[(i + 1) % clip.size()];
        auto side = [&](Vec2 p) { return sign * ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)); };
        std::vector<Vec2> in = std::move(out);
        out.clear();
        for (std::size_t k = 0; k < in.size(); ++k) {
            const Vec2 p = in[k], q = in[(k + 1) % in.size()];
            const double sp = side(p), sq = side(q);
            if (sp >= 0) out.push_back(p);
            if ((sp >= 0) != (sq >= 0)) {
                const double t = sp / (sp - sq);
                out.push_back({p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t});
            }
        }
    }
    return out;
}

int classify_point(Vec2 p, const std::vector<Vec2> &poly, double eps) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2 a = poly[j], b = poly[i];
        // distance to edge
        const Vec2 ab{b.x - a.x, b.y - a.y};
        const double len2 = ab.x * ab.x + ab.y * ab.y;
        double t = len2 > 0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dx = a.x + ab.x * t - p.x, dy = a.y + ab.y * t - p.y;
        if (dx * dx + dy * dy <= eps * eps) return 0;
        if ((a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)) inside = !inside;
    }
    return inside ? 1 : -1;
}

bool free_point(Vec2 p, const MapFile &map) {
    const Rect &b = map.bounds;
    if (p.x < b.min_x || p.x > b.max_x || p.y < b.min_y || p.y > b.max_y) return false;
    for (const auto &o : map.obstacles) {
        if (classify_point(p, o.vertices) > 0) return false;
    }
    return true;
}

namespace {

double polygon_rect_overlap(const std::vector<Vec2> &poly, const Rect &r) {
    const std::vector<Vec2> box{{r.min_x, r.min_y}, {r.max_x, r.min_y}, {r.max_x, r.max_y}, {r.min_x, r.max_y}};
    return std::abs(shoelace(convex_intersection(poly, box)));
}

bool turns_one_way(const std::vector<Vec2> &pts) {
    int pos = 0, neg = 0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = pts[i], b = pts[(i + 1) % n], c = pts[(i + 2) % n];
        const double z = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        const double scale = std::max(1.0, std::hypot(b.x - a.x, b.y - a.y) * std::hypot(c.x - b.x, c.y - b.y));
        if (z > 1e-9 * scale) ++pos;
        if (z < -1e-9 * scale) ++neg;
    }
    return pos == 0 || neg == 0;
}

} // namespace

MeshReport check_navmesh(const MapFile &map, const NavMesh &mesh, int samples, std::uint64_t seed,
                         const std::vector<double> &clearances) {
    MeshReport r;
    r.cells = static_cast<int>(mesh.cells.size());
    std::vector<std::vector<Vec2>> cells;
    for (const auto &c : mesh.cells) cells.push_back(c.vertices);

    double cell_area = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!turns_one_way(cells[i])) {
            ++r.nonconvex;
            r.notes.push_back("cell " + std::to_string(i) + " is not convex");
        }
        cell_area += std::abs(shoelace(cells[i]));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            const double a = std::abs(shoelace(convex_intersection(cells[i], cells[j])));
            if (a > 1e-6) {
                ++r.overlapping_pairs;
                r.notes.push_back("cells " + std::to_string(i) + " and " + std::to_string(j) + " overlap by " +
                                  std::to_string(a));
            }
        }
        // Obstacles may be concave, so the obstacle is the subject and the
        // convex cell the clip window.
        for (const auto &o : map.obstacles) {
            const double a = std::abs(shoelace(convex_intersection(o.vertices, cells[i])));
            if (a > 1e-6) {
                ++r.cells_in_obstacles;
                r.notes.push_back("cell " + std::to_string(i) + " covers obstacle area " + std::to_string(a));
                break;
            }
        }
    }
    double obstacle_area = 0.0;
    for (const auto &o : map.obstacles) obstacle_area += polygon_rect_overlap(o.vertices, map.bounds);
    r.area_error = std::abs(cell_area - (map.bounds.area() - obstacle_area));

    SplitMix64 rng(SplitMix64::mix(seed + 0x3C));
    const Rect &b = map.bounds;
    for (int s = 0; s < samples; ++s) {
        const Vec2 p{rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y)};
        if (!free_point(p, map)) continue;
        bool covered = false;
        for (const auto &c : cells) {
            if (classify_point(p, c, 1e-7) >= 0) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            ++r.uncovered_samples;
            if (r.uncovered_samples <= 3) r.notes.push_back("free point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") in no cell");
        }
    }

    const Terrain terrain = map.terrain();
    for (double c : clearances) {
        const PathNetwork net = place_pathnodes(mesh, terrain, c, nullptr);
        for (const auto &arc : net.arcs()) {
            ++r.arcs;
            if (!clear_line(net.waypoint(arc.a), net.waypoint(arc.b), terrain, c)) {
                ++r.bad_arcs;
                r.notes.push_back("arc " + std::to_string(arc.a) + "-" + std::to_string(arc.b) + " blocked at clearance " +
                                  std::to_string(c));
            }
        }
    }
    return r;
}

// ---- behaviour trees -------------------------------------------------------------

namespace {

json random_node(SplitMix64 &rng, int depth, int max_depth, int max_children, int &counter) {
    const int id = counter++;
    const bool leaf = depth >= max_depth || (depth > 0 && rng.below(3) == 0);
    if (leaf) {
        const bool cond = rng.below(2) == 0;
        json script = json::array();
        const int len = 1 + static_cast<int>(rng.below(6));
        for (int i = 0; i < len; ++i) {
            const auto r = rng.below(cond ? 2 : 3);
            script.push_back(r == 0 ? "success" : r == 1 ? "failure" : "running");
        }
        return {{"kind", cond ? "condition" : "action"}, {"name", "n" + std::to_string(id)}, {"script", script}};
    }
    json children = json::array();
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_children)));
    const std::string kind = rng.below(2) == 0 ? "choice" : "sequence";
    json node{{"kind", kind}, {"name", "n" + std::to_string(id)}};
    for (int i = 0; i < k; ++i) children.push_back(random_node(rng, depth + 1, max_depth, max_children, counter));
    node["children"] = children;
    return node;
}

struct RefNode {
    std::string name;
    bool composite = false;
    bool choice = false;
    std::vector<int> kids;
    std::vector<BtStatus> script;
    std::size_t cursor = 0;
    bool active = false;
    int running = -1;
};

struct RefTree {
    std::vector<RefNode> nodes;
    std::vector<BtTraceEvent> out;
    std::int64_t now = 0;
    bool reactive = false;

    int load(const json &j) {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        const std::string kind = j.at("kind").get<std::string>();
        nodes[id].name = j.at("name").get<std::string>();
        nodes[id].composite = kind == "choice" || kind == "sequence";
        nodes[id].choice = kind == "choice";
        if (!nodes[id].composite) {
            for (const auto &s : j.value("script", json::array())) {
                const std::string v = s.get<std::string>();
                nodes[id].script.push_back(v == "success" ? BtStatus::Success
                                           : v == "failure" ? BtStatus::Failure
                                                            : BtStatus::Running);
            }
            if (nodes[id].script.empty()) nodes[id].script.push_back(BtStatus::Success);
            return id;
        }
        for (const auto &c : j.at("children")) {
            const int k = load(c);
            nodes[id].kids.push_back(k);
        }
        return id;
    }

    void log(int id, BtTraceEvent::Kind k, BtStatus s = BtStatus::Success) {
        out.push_back({now, id, nodes[id].name, k, s});
    }

    void stop(int id) {
        RefNode &n = nodes[id];
        n.active = false;
        n.running = -1;
        log(id, BtTraceEvent::Kind::CedeControl);
    }

    void interrupt(int id) {
        if (!nodes[id].active) return;
        if (nodes[id].running >= 0) interrupt(nodes[id].kids[nodes[id].running]);
        stop(id);
    }

    BtStatus eval(int id) {
        if (!nodes[id].active) {
            nodes[id].active = true;
            log(id, BtTraceEvent::Kind::TakeControl);
        }
        BtStatus result;
        if (!nodes[id].composite) {
            RefNode &n = nodes[id];
            result = n.script[std::min(n.cursor, n.script.size() - 1)];
            ++n.cursor;
        } else {
            // choice looks for the first child that does not fail, sequence
            // for the first that does not succeed
            const BtStatus pass = nodes[id].choice ? BtStatus::Failure : BtStatus::Success;
            const int was_running = nodes[id].running;
            nodes[id].running = -1;
            result = pass;
            const int first = (!reactive && was_running >= 0) ? was_running : 0;
            for (int i = first; i < static_cast<int>(nodes[id].kids.size()); ++i) {
                result = eval(nodes[id].kids[i]);
                if (reactive && was_running >= 0 && i < was_running && result != pass) {
                    interrupt(nodes[id].kids[was_running]);
                }
                if (result == BtStatus::Running) nodes[id].running = i;
                if (result != pass) break;
            }
        }
        log(id, BtTraceEvent::Kind::Tick, result);
        if (result != BtStatus::Running) stop(id);
        return result;
    }
};

} // namespace

json random_bt(std::uint64_t seed, int max_depth, int max_children) {
    SplitMix64 rng(SplitMix64::mix(seed + 0xB7));
    int counter = 0;
    return random_node(rng, 0, max_depth, max_children, counter);
}

std::vector<BtTraceEvent> reference_bt_trace(const json &tree, int ticks, bool reactive) {
    RefTree t;
    t.reactive = reactive;
    t.load(tree);
    for (int k = 0; k < ticks; ++k) {
        t.eval(0);
        ++t.now;
    }
    return t.out;
}

// ---- state machines --------------------------------------------------------------

std::string check_fsm_trace(const std::vector<FsmRecord> &trace) {
    std::string open; // state of the current group, empty when between groups
    std::map<int, int> exits_per_tick;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto &r = trace[i];
        const std::string at = "record " + std::to_string(i) + " (tick " + std::to_string(r.tick) + "): ";
        switch (r.hook) {
        case FsmHook::Enter:
            if (!open.empty()) return at + "enter " + r.state + " while " + open + " is active";
            open = r.state;
            break;
        case FsmHook::Tick:
            if (open != r.state) return at + "tick of " + r.state + " but active is '" + open + "'";
            break;
        case FsmHook::Exit:
            if (open != r.state) return at + "exit of " + r.state + " but active is '" + open + "'";
            if (++exits_per_tick[r.tick] > 1) return at + "second transition in one tick";
            open.clear();
            break;
        }
    }
    return {};
}

namespace {

// Preorder structure of a JSON tree: parent and child lists by node index.
struct Shape {
    std::vector<int> parent;
    std::vector<std::vector<int>> kids;
    std::vector<bool> choice, composite;
    int add(const json &j, int up) {
        const int id = static_cast<int>(parent.size());
        parent.push_back(up);
        kids.emplace_back();
        choice.push_back(j["kind"] == "choice");
        composite.push_back(j.contains("children"));
        if (j.contains("children")) {
            for (const auto &c : j["children"]) {
                const int k = add(c, id);
                kids[static_cast<std::size_t>(id)].push_back(k);
            }
        }
        return id;
    }
    int index_in_parent(int n) const {
        const auto &sib = kids[static_cast<std::size_t>(parent[static_cast<std::size_t>(n)])];
        return static_cast<int>(std::find(sib.begin(), sib.end(), n) - sib.begin());
    }
};

} // namespace

std::vector<BtTraceEvent> run_and_reset(const json &tree, int ticks, bool reactive) {
    ScriptedTree st = scripted_tree_from_json(tree.dump());
    BehaviorTree<ScriptedLeaves> bt(std::move(st.root), {reactive});
    std::vector<BtTraceEvent> out;
    bt.set_trace([&](const BtTraceEvent &e) { out.push_back(e); });
    for (int i = 0; i < ticks; ++i) bt.tick(st.leaves);
    bt.reset(st.leaves);
    return out;
}

std::string check_bt_properties(const json &tree, const std::vector<BtTraceEvent> &trace, bool reactive) {
    Shape sh;
    sh.add(tree, -1);
    const std::size_t n = sh.parent.size();
    std::vector<int> open(n, 0);
    std::vector<std::set<int>> succeeded(n); // per sequence: children that succeeded this activation
    std::map<std::int64_t, std::vector<const BtTraceEvent *>> ticks_by_frame;
    for (const auto &e : trace) {
        const auto node = static_cast<std::size_t>(e.node);
        switch (e.kind) {
        case BtTraceEvent::Kind::TakeControl:
            if (open[node]++) return "double take_control at " + e.name;
            succeeded[node].clear();
            break;
        case BtTraceEvent::Kind::CedeControl:
            if (--open[node] != 0) return "cede_control without take_control at " + e.name;
            break;
        case BtTraceEvent::Kind::Tick: {
            if (!open[node]) return "tick outside control at " + e.name;
            ticks_by_frame[e.tick].push_back(&e);
            const int p = sh.parent[node];
            if (p >= 0 && !sh.choice[static_cast<std::size_t>(p)]) {
                const int i = sh.index_in_parent(e.node);
                if (i > 0 && !succeeded[static_cast<std::size_t>(p)].count(i - 1)) {
                    return "sequence child " + e.name + " ticked before its left sibling succeeded";
                }
                if (e.status == BtStatus::Success) succeeded[static_cast<std::size_t>(p)].insert(i);
            }
            break;
        }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (open[i]) return "unpaired take_control at node " + std::to_string(i);
    }
    // per frame: choice short-circuit and, when memoryful, no ticks left of a running child
    std::map<int, int> running_child; // composite -> child index running at the end of the previous frame
    for (const auto &[frame, evs] : ticks_by_frame) {
        std::map<int, int> now_running;
        std::map<int, bool> settled; // choice already found an applicable child this frame
        for (const BtTraceEvent *e : evs) {
            const int p = sh.parent[static_cast<std::size_t>(e->node)];
            if (p < 0) continue;
            const int i = sh.index_in_parent(e->node);
            if (sh.choice[static_cast<std::size_t>(p)]) {
                if (settled[p]) return "choice ran " + e->name + " after an applicable sibling";
                if (e->status != BtStatus::Failure) settled[p] = true;
            }
            if (!reactive) {
                auto it = running_child.find(p);
                if (it != running_child.end() && i < it->second) return "left sibling " + e->name + " re-ticked while resuming";
            }
            if (e->status == BtStatus::Running) now_running[p] = i;
        }
        running_child = now_running;
    }
    return {};
}

} // namespace arena::testing
