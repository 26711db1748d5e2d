#pragma once

#include "arena/engine.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace arena {

/// Live session host: the engine runs at real-time pace on a timer, a human
/// drives team A's hero over a websocket, everything else is AI.
///
/// Frames out: "hello" and "map" on connect, "state" at the frame rate,
/// "error" for rejected input, "end" at match end. Frames in: "cmd" (see
/// parse_player_command). The newest connection holds control; older ones
/// keep receiving state. Plain HTTP GETs serve the static client, plus
/// /state, /map and /replays/<file>.
struct ServeOptions {
    MapFile map;
    ControllerBundle opponent;
    /// Team A's non-hero kinds. Defaults to minion-fsm minions.
    std::optional<ControllerBundle> support;
    RulesConfig rules;
    std::uint64_t seed = 1;
    Tick max_ticks = 9000;
    std::string address = "127.0.0.1";
    unsigned short port = 8080; ///< 0 picks a free port
    std::filesystem::path static_dir;
    std::filesystem::path replay_dir;
    int tick_rate = kTicksPerSecond;
    int ticks_per_frame = 2; ///< 30 ticks/s -> 15 frames/s
    double max_seconds = 0.0; ///< stop after this long; 0 = at match end
    double linger_seconds = 2.0; ///< keep serving this long after the end frame
};

class SessionServer {
public:
    explicit SessionServer(ServeOptions options);
    ~SessionServer();
    SessionServer(const SessionServer &) = delete;
    SessionServer &operator=(const SessionServer &) = delete;

    /// Binds the listener; returns the bound port. Throws when the port is taken.
    unsigned short listen();
    /// Runs until the match ends (plus linger), max_seconds passes or stop().
    void run();
    /// Safe from any thread.
    void stop();

    AgentId human_hero() const;
    /// Valid once run() has returned.
    MatchResult result() const;
    /// One line per accepted or rejected client frame: "<tick> <verdict> <frame>".
    std::vector<std::string> session_log() const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

/// CLI entry: listen, log the URL, run. False when the port could not be bound.
bool run_serve(const ServeOptions &options);

} // namespace arena
