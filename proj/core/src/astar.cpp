#include "arena/astar.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace arena {

namespace {

struct OpenEntry {
    double f;
    double g;
    int node;
};

// priority_queue pops the greatest element; "greater" here means better.
struct Worse {
    bool operator()(const OpenEntry &a, const OpenEntry &b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        return a.node > b.node;
    }
};

} // namespace

SearchResult astar(const PathNetwork &net, const ArcBlocked &blocked, int start, int goal, const ExpandHook &on_expand) {
    SearchResult res;
    const int n = static_cast<int>(net.size());
    if (start < 0 || goal < 0 || start >= n || goal >= n) return res;
    const Vec2 target = net.waypoint(goal);
    std::vector<double> g(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, Worse> open;
    g[static_cast<std::size_t>(start)] = 0.0;
    open.push({distance(net.waypoint(start), target), 0.0, start});
    while (!open.empty()) {
        const OpenEntry cur = open.top();
        open.pop();
        if (cur.g > g[static_cast<std::size_t>(cur.node)]) continue;
        if (cur.node == goal) {
            res.found = true;
            res.cost = cur.g;
            for (int at = goal; at != -1; at = parent[static_cast<std::size_t>(at)]) res.path.push_back(at);
            std::reverse(res.path.begin(), res.path.end());
            return res;
        }
        ++res.expanded;
        if (on_expand) on_expand(cur.node, cur.g, cur.f - cur.g);
        for (const auto &nb : net.neighbors(cur.node)) {
            if (blocked && blocked(nb.arc)) continue;
            const double ng = cur.g + net.arc(nb.arc).length;
            auto &slot = g[static_cast<std::size_t>(nb.node)];
            if (ng < slot) {
                slot = ng;
                parent[static_cast<std::size_t>(nb.node)] = cur.node;
                open.push({ng + distance(net.waypoint(nb.node), target), ng, nb.node});
            }
        }
    }
    return res;
}

double path_length(std::span<const Vec2> path) {
    double s = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) s += distance(path[i - 1], path[i]);
    return s;
}

std::vector<Vec2> smooth(std::span<const Vec2> path, const LineOfSight &los, double clearance,
                         std::span<const Segment> walls) {
    if (path.size() <= 2) return {path.begin(), path.end()};
    std::vector<Vec2> out{path.front()};
    std::size_t anchor = 0;
    while (anchor + 1 < path.size()) {
        std::size_t next = anchor + 1;
        for (std::size_t j = path.size() - 1; j > anchor + 1; --j) {
            if (los.clear(path[anchor], path[j], clearance, walls)) {
                next = j;
                break;
            }
        }
        out.push_back(path[next]);
        anchor = next;
    }
    return out;
}

GateArcIndex index_gate_arcs(const PathNetwork &net, std::span<const Segment> gates, double clearance) {
    GateArcIndex idx;
    idx.arcs_by_gate.resize(gates.size());
    for (std::size_t g = 0; g < gates.size(); ++g) {
        for (std::size_t a = 0; a < net.arcs().size(); ++a) {
            const auto &arc = net.arcs()[a];
            if (wall_blocks(gates[g], net.waypoint(arc.a), net.waypoint(arc.b), clearance)) {
                idx.arcs_by_gate[g].push_back(static_cast<int>(a));
            }
        }
    }
    return idx;
}

ReplanningNavigator::ReplanningNavigator(std::shared_ptr<const PathNetwork> net,
                                         std::shared_ptr<const GateArcIndex> gates, bool smoothing)
    : net_(std::move(net)), gates_(std::move(gates)), smoothing_(smoothing) {}

void ReplanningNavigator::set_target(const NavContext &ctx, Vec2 target) {
    if (target_ && nearly_equal(*target_, target)) return;
    target_ = target;
    if (!stuck_ && !need_plan_ && cursor_ < legs_.size()) {
        const Vec2 prev = cursor_ + 1 < legs_.size() ? legs_[legs_.size() - 2] : ctx.agent.position;
        if (ctx.clear(prev, target)) {
            legs_.back() = target;
            return;
        }
    }
    need_plan_ = true;
    stuck_ = false;
}

void ReplanningNavigator::clear_target() {
    target_.reset();
    legs_.clear();
    cursor_ = 0;
    need_plan_ = false;
    stuck_ = false;
}

bool ReplanningNavigator::arc_marked(int arc, const WorldState &world) const {
    auto it = marks_.find(arc);
    if (it == marks_.end()) return false;
    const auto [gate, toggles] = it->second;
    return gate >= 0 && gate < static_cast<int>(world.gates.size()) &&
           world.gates[static_cast<std::size_t>(gate)].toggles == toggles;
}

bool ReplanningNavigator::plan(const NavContext &ctx) {
    legs_.clear();
    cursor_ = 0;
    const Vec2 pos = ctx.agent.position;
    const Vec2 to = *target_;
    for (auto it = marks_.begin(); it != marks_.end();) {
        it = arc_marked(it->first, ctx.world) ? std::next(it) : marks_.erase(it);
    }
    if (ctx.clear(pos, to)) {
        legs_.push_back(to);
        return true;
    }
    constexpr std::size_t kMaxAttach = 6;
    auto attach = [&](Vec2 p, bool from_side) {
        std::vector<int> order(net_->size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return distance(p, net_->waypoint(a)) < distance(p, net_->waypoint(b));
        });
        std::vector<int> out;
        for (int w : order) {
            const bool ok = from_side ? ctx.clear(p, net_->waypoint(w)) : ctx.clear(net_->waypoint(w), p);
            if (ok) out.push_back(w);
            if (out.size() >= kMaxAttach) break;
        }
        return out;
    };
    const auto entries = attach(pos, true);
    if (entries.empty()) return false;
    const auto exits = attach(to, false);
    const ArcBlocked blocked = [&](int arc) { return arc_marked(arc, ctx.world); };
    for (int in : entries) {
        for (int out : exits) {
            const SearchResult r = astar(*net_, blocked, in, out);
            if (!r.found) continue;
            std::vector<Vec2> pts{pos};
            for (int w : r.path) pts.push_back(net_->waypoint(w));
            pts.push_back(to);
            if (smoothing_) pts = smooth(pts, ctx.los, ctx.agent.radius, ctx.walls);
            legs_.assign(pts.begin() + 1, pts.end());
            return true;
        }
    }
    return false;
}

NavStep ReplanningNavigator::update(const NavContext &ctx) {
    const Vec2 pos = ctx.agent.position;
    if (!target_) return {NavStatus::Idle, pos};
    if (nearly_equal(pos, *target_)) return {NavStatus::Arrived, *target_};
    auto go_stuck = [&]() {
        if (!stuck_) ctx.emit(EventKind::Stuck, "no route");
        stuck_ = true;
        stuck_epoch_ = ctx.gate_epoch();
        return NavStep{NavStatus::Stuck, pos};
    };
    if (stuck_) {
        if (ctx.gate_epoch() == stuck_epoch_) return {NavStatus::Stuck, pos};
        if (!plan(ctx)) return go_stuck();
        stuck_ = false;
    }
    if (need_plan_) {
        need_plan_ = false;
        if (!plan(ctx)) return go_stuck();
    }
    while (cursor_ < legs_.size() && nearly_equal(pos, legs_[cursor_])) ++cursor_;
    if (cursor_ >= legs_.size() && !plan(ctx)) return go_stuck();
    const Vec2 next = legs_[cursor_];
    if (ctx.clear(pos, next)) return {NavStatus::Moving, next};

    std::string detail;
    for (const auto &g : ctx.world.gates) {
        if (g.open || !wall_blocks(g.segment, pos, next, ctx.agent.radius)) continue;
        if (g.id >= 0 && static_cast<std::size_t>(g.id) < gates_->arcs_by_gate.size()) {
            for (int arc : gates_->arcs_by_gate[static_cast<std::size_t>(g.id)]) marks_[arc] = {g.id, g.toggles};
        }
        detail += (detail.empty() ? "gate " : ",") + std::to_string(g.id);
    }
    ++replans_;
    ctx.emit(EventKind::Replan, detail.empty() ? "leg blocked" : detail);
    if (!plan(ctx)) return go_stuck();
    if (!ctx.clear(pos, legs_[cursor_])) return go_stuck();
    return {NavStatus::Moving, legs_[cursor_]};
}

std::vector<Vec2> ReplanningNavigator::remaining_path() const {
    if (cursor_ >= legs_.size()) return {};
    return {legs_.begin() + static_cast<std::ptrdiff_t>(cursor_), legs_.end()};
}

} // namespace arena
