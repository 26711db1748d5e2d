#pragma once

#include "arena/geometry.hpp"
#include "arena/navigator.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arena {

/// Boolean traversability table over the world bounds. A cell is traversable
/// iff its closed rectangle lies inside the bounds and overlaps no obstacle
/// interior.
struct NavGrid {
    Rect bounds;
    double cell_size = 1.0;
    int cols = 0;
    int rows = 0;
    std::vector<char> traversable; ///< row-major: [row * cols + col]

    bool in_range(int col, int row) const { return col >= 0 && row >= 0 && col < cols && row < rows; }
    bool at(int col, int row) const {
        return in_range(col, row) && traversable[static_cast<std::size_t>(row * cols + col)] != 0;
    }
    Rect cell_rect(int col, int row) const;
    Vec2 center(int col, int row) const;
    std::optional<std::pair<int, int>> cell_of(Vec2 p) const;
    std::size_t traversable_count() const;
};

NavGrid build_navgrid(const Terrain &terrain, double cell_size);

struct GridStep {
    enum class Kind { Move, Arrived, Failed };
    Kind kind = Kind::Failed;
    Vec2 next;
};

/// Greedy hill-climb: step to the 8-neighbour centre closest to `to`, failing
/// at local minima. Diagonals need both adjacent cardinal cells traversable.
GridStep grid_navigate(const NavGrid &grid, Vec2 from, Vec2 to);

std::string navgrid_to_json(const NavGrid &grid);

class GridNavigator final : public Navigator {
public:
    explicit GridNavigator(std::shared_ptr<const NavGrid> grid) : grid_(std::move(grid)) {}

    void set_target(const NavContext &ctx, Vec2 target) override;
    void clear_target() override;
    NavStep update(const NavContext &ctx) override;
    std::optional<Vec2> target() const override { return target_; }
    std::vector<Vec2> remaining_path() const override;

private:
    std::shared_ptr<const NavGrid> grid_;
    std::optional<Vec2> target_;
    std::optional<Vec2> leg_;
    bool failed_ = false;
};

} // namespace arena
