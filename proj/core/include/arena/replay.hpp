#pragma once

#include "arena/engine.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace arena {

inline constexpr std::string_view kEngineVersion = "0.1.0";

/// A finished match as stored on disk: one header line, then one line per
/// event, the last of which is the match_end event.
struct Replay {
    std::string engine_version{kEngineVersion};
    std::uint64_t map_hash = 0;
    std::uint64_t seed = 0;
    std::string map_name;
    std::string team_a;
    std::string team_b;
    MatchResult result;
    friend bool operator==(const Replay &, const Replay &) = default;
};

Replay make_replay(const MapFile &map, std::uint64_t seed, const std::string &team_a, const std::string &team_b,
                   MatchResult result);

class ReplayError : public std::runtime_error {
public:
    ReplayError(int line, const std::string &msg)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    /// 1-based line number, or 0 for whole-file problems.
    int line() const { return line_; }

private:
    int line_;
};

/// Structurally sound file written by another engine version or for another map.
class ReplayIncompatible : public ReplayError {
public:
    using ReplayError::ReplayError;
};

std::string replay_to_jsonl(const Replay &r);
/// Throws ReplayError naming the offending line; ReplayIncompatible when the
/// engine version differs or `expected_map_hash` is given and differs.
Replay replay_from_jsonl(std::string_view text, std::optional<std::uint64_t> expected_map_hash = std::nullopt);

void write_replay(const std::filesystem::path &path, const Replay &r);
Replay load_replay(const std::filesystem::path &path, std::optional<std::uint64_t> expected_map_hash = std::nullopt);

nlohmann::json event_to_json(const GameEvent &e);
GameEvent event_from_json(const nlohmann::json &j);
nlohmann::json stats_to_json(const TeamStats &s);

std::string outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(std::string_view s);

} // namespace arena
