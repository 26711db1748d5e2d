#include "arena/apsp.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace arena {

SuccessorTable floyd_warshall(const PathNetwork &net) {
    SuccessorTable t;
    t.n = static_cast<int>(net.size());
    const auto nn = static_cast<std::size_t>(t.n) * static_cast<std::size_t>(t.n);
    t.dist.assign(nn, kUnreachable);
    t.next.assign(nn, kNoWaypoint);
    for (int i = 0; i < t.n; ++i) {
        t.dist[t.index(i, i)] = 0.0;
        t.next[t.index(i, i)] = i;
    }
    for (const auto &arc : net.arcs()) {
        if (arc.length < t.dist[t.index(arc.a, arc.b)]) {
            t.dist[t.index(arc.a, arc.b)] = arc.length;
            t.dist[t.index(arc.b, arc.a)] = arc.length;
            t.next[t.index(arc.a, arc.b)] = arc.b;
            t.next[t.index(arc.b, arc.a)] = arc.a;
        }
    }
    const std::size_t n = static_cast<std::size_t>(t.n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double dik = t.dist[i * n + k];
            if (dik == kUnreachable) continue;
            const int hop = t.next[i * n + k];
            double *row = &t.dist[i * n];
            const double *krow = &t.dist[k * n];
            for (std::size_t j = 0; j < n; ++j) {
                const double via = dik + krow[j];
                if (via < row[j]) {
                    row[j] = via;
                    t.next[i * n + j] = hop;
                }
            }
        }
    }
    // Report the hop-by-hop sum along each successor path, the same
    // accumulation order a single-source search uses.
    for (int i = 0; i < t.n; ++i) {
        for (int j = 0; j < t.n; ++j) {
            if (i == j || t.next[t.index(i, j)] == kNoWaypoint) continue;
            double sum = 0.0;
            int at = i;
            for (int guard = 0; at != j && guard <= t.n; ++guard) {
                const int nxt = t.next[t.index(at, j)];
                sum += distance(net.waypoint(at), net.waypoint(nxt));
                at = nxt;
            }
            t.dist[t.index(i, j)] = sum;
        }
    }
    return t;
}

std::optional<std::vector<int>> reconstruct_path(const SuccessorTable &table, int i, int j) {
    if (i < 0 || j < 0 || i >= table.n || j >= table.n) return std::nullopt;
    if (table.successor(i, j) == kNoWaypoint) return std::nullopt;
    std::vector<int> path{i};
    int at = i;
    while (at != j) {
        at = table.successor(at, j);
        if (at == kNoWaypoint || path.size() > static_cast<std::size_t>(table.n)) return std::nullopt;
        path.push_back(at);
    }
    return path;
}

namespace {

// Waypoint indices sorted by (distance, index); visibility is evaluated lazily.
std::vector<int> by_distance(const PathNetwork &net, Vec2 p) {
    std::vector<int> order(net.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return distance(p, net.waypoint(a)) < distance(p, net.waypoint(b)); });
    return order;
}

} // namespace

std::optional<LegPlan> apsp_navigate(const SuccessorTable &table, const PathNetwork &net, Vec2 from, Vec2 to,
                                     const LineOfSight &los, double clearance, std::span<const Segment> walls) {
    if (los.clear(from, to, clearance, walls)) {
        return LegPlan{{from, to}, {}, distance(from, to)};
    }
    std::vector<int> entries;
    for (int w : by_distance(net, from)) {
        if (los.clear(from, net.waypoint(w), clearance, walls)) entries.push_back(w);
    }
    if (entries.empty()) return std::nullopt;
    std::vector<int> exits;
    for (int w : by_distance(net, to)) {
        if (los.clear(net.waypoint(w), to, clearance, walls)) exits.push_back(w);
    }
    for (int in : entries) {
        for (int out : exits) {
            auto path = reconstruct_path(table, in, out);
            if (!path) continue;
            LegPlan plan;
            plan.points.push_back(from);
            for (int w : *path) plan.points.push_back(net.waypoint(w));
            plan.points.push_back(to);
            plan.waypoints = std::move(*path);
            for (std::size_t k = 1; k < plan.points.size(); ++k) {
                plan.length += distance(plan.points[k - 1], plan.points[k]);
            }
            return plan;
        }
    }
    return std::nullopt;
}

namespace {

constexpr std::uint32_t kTableVersion = 1;

template <typename T> void put(std::ostream &out, T v) {
    static_assert(std::endian::native == std::endian::little, "table I/O assumes a little-endian host");
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T> T get(std::istream &in) {
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T))) throw std::runtime_error("apsp table: truncated input");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void write_table(const SuccessorTable &table, std::ostream &out) {
    out.write("APSP", 4);
    put<std::uint32_t>(out, kTableVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(table.n));
    for (double d : table.dist) put<double>(out, d);
    for (int v : table.next) put<std::int32_t>(out, v);
}

SuccessorTable read_table(std::istream &in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || std::memcmp(magic.data(), "APSP", 4) != 0) {
        throw std::runtime_error("apsp table: bad magic");
    }
    if (get<std::uint32_t>(in) != kTableVersion) throw std::runtime_error("apsp table: unsupported version");
    SuccessorTable t;
    t.n = static_cast<int>(get<std::uint32_t>(in));
    const auto nn = static_cast<std::size_t>(t.n) * static_cast<std::size_t>(t.n);
    t.dist.resize(nn);
    t.next.resize(nn);
    for (auto &d : t.dist) d = get<double>(in);
    for (auto &v : t.next) v = get<std::int32_t>(in);
    return t;
}

void ApspNavigator::set_target(const NavContext &, Vec2 target) {
    if (target_ && nearly_equal(*target_, target)) return;
    target_ = target;
    planned_ = false;
    stuck_ = false;
}

void ApspNavigator::clear_target() {
    target_.reset();
    legs_.clear();
    cursor_ = 0;
    planned_ = false;
    stuck_ = false;
}

void ApspNavigator::plan(const NavContext &ctx) {
    planned_ = true;
    legs_.clear();
    cursor_ = 0;
    auto p = apsp_navigate(*table_, *net_, ctx.agent.position, *target_, ctx.los, ctx.agent.radius);
    if (p) legs_.assign(p->points.begin() + 1, p->points.end());
}

NavStep ApspNavigator::update(const NavContext &ctx) {
    const Vec2 pos = ctx.agent.position;
    if (!target_) return {NavStatus::Idle, pos};
    if (nearly_equal(pos, *target_)) return {NavStatus::Arrived, *target_};
    if (!planned_ || (stuck_ && legs_.empty() && ctx.gate_epoch() != stuck_epoch_)) plan(ctx);
    while (cursor_ < legs_.size() && nearly_equal(pos, legs_[cursor_])) ++cursor_;
    if (cursor_ >= legs_.size() || !ctx.clear(pos, legs_[cursor_])) {
        if (!stuck_) ctx.emit(EventKind::Stuck, "apsp leg blocked");
        stuck_ = true;
        stuck_epoch_ = ctx.gate_epoch();
        return {NavStatus::Stuck, pos};
    }
    stuck_ = false;
    return {NavStatus::Moving, legs_[cursor_]};
}

std::vector<Vec2> ApspNavigator::remaining_path() const {
    if (cursor_ >= legs_.size()) return {};
    return {legs_.begin() + static_cast<std::ptrdiff_t>(cursor_), legs_.end()};
}

} // namespace arena
