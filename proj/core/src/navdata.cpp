#include "arena/navdata.hpp"

namespace arena {

NavData::NavData(const MapFile &map, bool accelerate_los)
    : terrain_(map.terrain()), waypoints_(map.waypoints), los_(map.terrain(), accelerate_los) {
    for (const auto &g : map.gates) gates_.push_back(g.segment);
}

const NavMesh &NavData::mesh() const {
    std::lock_guard lock(mutex_);
    if (!mesh_) mesh_ = std::make_unique<NavMesh>(build_navmesh(terrain_));
    return *mesh_;
}

const NavLayer &NavData::layer(double clearance) const {
    {
        std::lock_guard lock(mutex_);
        auto it = layers_.find(clearance);
        if (it != layers_.end()) return *it->second;
    }
    auto layer = std::make_unique<NavLayer>();
    layer->clearance = clearance;
    PathNetwork net = waypoints_.empty() ? place_pathnodes(mesh(), terrain_, clearance, &los_)
                                         : connect_waypoints(terrain_, waypoints_, clearance, &los_);
    layer->net = std::make_shared<const PathNetwork>(std::move(net));
    layer->table = std::make_shared<const SuccessorTable>(floyd_warshall(*layer->net));
    layer->gate_arcs = std::make_shared<const GateArcIndex>(index_gate_arcs(*layer->net, gates_, clearance));
    std::lock_guard lock(mutex_);
    auto [it, inserted] = layers_.emplace(clearance, std::move(layer));
    return *it->second;
}

std::shared_ptr<const NavGrid> NavData::grid(double cell_size) const {
    std::lock_guard lock(mutex_);
    auto &slot = grids_[cell_size];
    if (!slot) slot = std::make_shared<const NavGrid>(build_navgrid(terrain_, cell_size));
    return slot;
}

bool NavData::known_navigator(const std::string &kind) {
    return kind == "direct" || kind == "grid" || kind == "apsp" || kind == "astar" || kind == "astar-smooth";
}

std::unique_ptr<Navigator> NavData::make_navigator(const std::string &kind, const Agent &agent) const {
    if (kind == "direct") return std::make_unique<DirectNavigator>();
    if (kind == "grid") return std::make_unique<GridNavigator>(grid(2.0 * agent.radius));
    const NavLayer &l = layer(agent.radius);
    if (kind == "apsp") return std::make_unique<ApspNavigator>(l.net, l.table);
    if (kind == "astar") return std::make_unique<ReplanningNavigator>(l.net, l.gate_arcs, false);
    if (kind == "astar-smooth") return std::make_unique<ReplanningNavigator>(l.net, l.gate_arcs, true);
    throw std::invalid_argument("unknown navigator kind: " + kind);
}

} // namespace arena
