#pragma once

#include "arena/engine.hpp"
#include "arena/map.hpp"

#include <filesystem>
#include <functional>
#include <string>

#ifndef ARENA_DATA_DIR
#define ARENA_DATA_DIR "data"
#endif

namespace arena::testing {

inline std::filesystem::path data_path(const std::string &rel) { return std::filesystem::path(ARENA_DATA_DIR) / rel; }

inline MapFile shipped_map(const std::string &name) { return load_map(data_path("maps/" + name + ".json")); }

inline const char *kShippedMaps[] = {"arena", "gates", "crystals", "cup", "edge", "duel", "waypoints"};

/// Controller whose hooks are plain lambdas.
class LambdaController final : public Controller {
public:
    using Fn = std::function<void(const Perception &, AgentApi &)>;
    explicit LambdaController(Fn tick, Fn spawn = {}) : tick_(std::move(tick)), spawn_(std::move(spawn)) {}
    void on_spawn(const Perception &v, AgentApi &a) override {
        if (spawn_) spawn_(v, a);
    }
    void on_tick(const Perception &v, AgentApi &a) override { tick_(v, a); }

private:
    Fn tick_;
    Fn spawn_;
};

inline std::unique_ptr<Controller> lambda_controller(LambdaController::Fn tick, LambdaController::Fn spawn = {}) {
    return std::make_unique<LambdaController>(std::move(tick), std::move(spawn));
}

/// Open 60x40 field, no teams.
inline MapFile open_field(double w = 60, double h = 40) {
    MapFile m;
    m.name = "open";
    m.bounds = {0, 0, w, h};
    return m;
}

} // namespace arena::testing
