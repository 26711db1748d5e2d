#include "arena/navgrid.hpp"

#include "arena/map.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace arena {

Rect NavGrid::cell_rect(int col, int row) const {
    const double x = bounds.min_x + col * cell_size;
    const double y = bounds.min_y + row * cell_size;
    return {x, y, x + cell_size, y + cell_size};
}

Vec2 NavGrid::center(int col, int row) const { return cell_rect(col, row).center(); }

std::optional<std::pair<int, int>> NavGrid::cell_of(Vec2 p) const {
    if (!bounds.contains(p)) return std::nullopt;
    int col = static_cast<int>(std::floor((p.x - bounds.min_x) / cell_size));
    int row = static_cast<int>(std::floor((p.y - bounds.min_y) / cell_size));
    col = std::clamp(col, 0, cols - 1);
    row = std::clamp(row, 0, rows - 1);
    return std::pair{col, row};
}

std::size_t NavGrid::traversable_count() const {
    std::size_t n = 0;
    for (char c : traversable) n += c ? 1 : 0;
    return n;
}

NavGrid build_navgrid(const Terrain &terrain, double cell_size) {
    if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
    NavGrid g;
    g.bounds = terrain.bounds;
    g.cell_size = cell_size;
    g.cols = std::max(1, static_cast<int>(std::ceil(terrain.bounds.width() / cell_size - kEpsilon)));
    g.rows = std::max(1, static_cast<int>(std::ceil(terrain.bounds.height() / cell_size - kEpsilon)));
    g.traversable.assign(static_cast<std::size_t>(g.cols * g.rows), 0);
    std::vector<Rect> boxes;
    for (const auto &o : terrain.obstacles) boxes.push_back(bounding_box(o));
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            const Rect cell = g.cell_rect(c, r);
            bool ok = cell.max_x <= terrain.bounds.max_x + kEpsilon && cell.max_y <= terrain.bounds.max_y + kEpsilon;
            for (std::size_t i = 0; ok && i < terrain.obstacles.size(); ++i) {
                if (!boxes[i].overlaps(cell, -kEpsilon)) continue;
                if (polygons_overlap(rectangle(cell), terrain.obstacles[i])) ok = false;
            }
            g.traversable[static_cast<std::size_t>(r * g.cols + c)] = ok ? 1 : 0;
        }
    }
    return g;
}

GridStep grid_navigate(const NavGrid &grid, Vec2 from, Vec2 to) {
    const auto fc = grid.cell_of(from);
    const auto tc = grid.cell_of(to);
    if (!fc || !tc || !grid.at(tc->first, tc->second)) return {GridStep::Kind::Failed, from};
    if (nearly_equal(from, to)) return {GridStep::Kind::Arrived, to};
    if (*fc == *tc) return {GridStep::Kind::Move, to};
    const double here = distance(from, to);
    int best_c = -1;
    int best_r = -1;
    double best = here - kEpsilon;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int c = fc->first + dc;
            const int r = fc->second + dr;
            if (!grid.at(c, r)) continue;
            if (dr != 0 && dc != 0 && (!grid.at(fc->first + dc, fc->second) || !grid.at(fc->first, fc->second + dr))) {
                continue;
            }
            const double d = distance(grid.center(c, r), to);
            if (d < best) {
                best = d;
                best_c = c;
                best_r = r;
            }
        }
    }
    if (best_c < 0) return {GridStep::Kind::Failed, from};
    return {GridStep::Kind::Move, grid.center(best_c, best_r)};
}

std::string navgrid_to_json(const NavGrid &grid) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < grid.rows; ++r) {
        std::string line;
        for (int c = 0; c < grid.cols; ++c) line.push_back(grid.at(c, r) ? '1' : '0');
        rows.push_back(line);
    }
    nlohmann::json j{{"cell_size", grid.cell_size},
                     {"cols", grid.cols},
                     {"rows", grid.rows},
                     {"origin", {grid.bounds.min_x, grid.bounds.min_y}},
                     {"traversable", rows}};
    return j.dump();
}

void GridNavigator::set_target(const NavContext &, Vec2 target) {
    if (target_ && nearly_equal(*target_, target)) return;
    target_ = target;
    leg_.reset();
    failed_ = false;
}

void GridNavigator::clear_target() {
    target_.reset();
    leg_.reset();
    failed_ = false;
}

NavStep GridNavigator::update(const NavContext &ctx) {
    const Vec2 pos = ctx.agent.position;
    if (!target_) return {NavStatus::Idle, pos};
    if (nearly_equal(pos, *target_)) return {NavStatus::Arrived, *target_};
    if (failed_) return {NavStatus::Stuck, pos};
    if (leg_ && !nearly_equal(pos, *leg_)) return {NavStatus::Moving, *leg_};
    const GridStep step = grid_navigate(*grid_, pos, *target_);
    switch (step.kind) {
    case GridStep::Kind::Arrived: return {NavStatus::Arrived, *target_};
    case GridStep::Kind::Failed:
        failed_ = true;
        leg_.reset();
        ctx.emit(EventKind::Stuck, "grid local minimum");
        return {NavStatus::Stuck, pos};
    case GridStep::Kind::Move: leg_ = step.next; return {NavStatus::Moving, step.next};
    }
    return {NavStatus::Stuck, pos};
}

std::vector<Vec2> GridNavigator::remaining_path() const {
    std::vector<Vec2> out;
    if (leg_) out.push_back(*leg_);
    if (target_) out.push_back(*target_);
    return out;
}

} // namespace arena
