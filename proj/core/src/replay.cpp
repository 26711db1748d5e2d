#include "arena/replay.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace arena {

using nlohmann::json;

std::string outcome_name(Outcome o) {
    switch (o) {
    case Outcome::Ongoing: return "ongoing";
    case Outcome::WinnerA: return "winner_a";
    case Outcome::WinnerB: return "winner_b";
    case Outcome::Draw: return "draw";
    }
    return "?";
}

std::optional<Outcome> outcome_from_name(std::string_view s) {
    for (auto o : {Outcome::Ongoing, Outcome::WinnerA, Outcome::WinnerB, Outcome::Draw}) {
        if (outcome_name(o) == s) return o;
    }
    return std::nullopt;
}

json event_to_json(const GameEvent &e) {
    json j{{"type", "event"},
           {"tick", e.tick},
           {"kind", to_string(e.kind)},
           {"agent", e.agent},
           {"other", e.other},
           {"amount", e.amount},
           {"team", to_string(e.team)},
           {"agent_kind", to_string(e.agent_kind)},
           {"x", e.position.x},
           {"y", e.position.y}};
    if (!e.detail.empty()) j["detail"] = e.detail;
    return j;
}

GameEvent event_from_json(const json &j) {
    GameEvent e;
    e.tick = j.at("tick").get<Tick>();
    const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown event kind '" + j.at("kind").get<std::string>() + "'");
    e.kind = *kind;
    e.agent = j.at("agent").get<AgentId>();
    e.other = j.at("other").get<AgentId>();
    e.amount = j.at("amount").get<std::int64_t>();
    const auto team = team_from_string(j.at("team").get<std::string>());
    if (!team) throw std::invalid_argument("unknown team");
    e.team = *team;
    const auto ak = kind_from_string(j.at("agent_kind").get<std::string>());
    if (!ak) throw std::invalid_argument("unknown agent kind");
    e.agent_kind = *ak;
    e.position = {j.at("x").get<double>(), j.at("y").get<double>()};
    e.detail = j.value("detail", std::string{});
    return e;
}

json stats_to_json(const TeamStats &s) {
    return {{"kills", s.kills},
            {"minions_spawned", s.minions_spawned},
            {"damage_dealt", s.damage_dealt},
            {"structure_damage_dealt", s.structure_damage_dealt},
            {"structure_damage_taken", s.structure_damage_taken}};
}

namespace {

TeamStats stats_from_json(const json &j) {
    TeamStats s;
    s.kills = j.at("kills").get<int>();
    s.minions_spawned = j.at("minions_spawned").get<int>();
    s.damage_dealt = j.at("damage_dealt").get<std::int64_t>();
    s.structure_damage_dealt = j.at("structure_damage_dealt").get<std::int64_t>();
    s.structure_damage_taken = j.at("structure_damage_taken").get<std::int64_t>();
    return s;
}

} // namespace

Replay make_replay(const MapFile &map, std::uint64_t seed, const std::string &team_a, const std::string &team_b,
                   MatchResult result) {
    Replay r;
    r.map_hash = map_hash(map);
    r.map_name = map.name;
    r.seed = seed;
    r.team_a = team_a;
    r.team_b = team_b;
    r.result = std::move(result);
    r.result.wall_seconds = 0.0;
    return r;
}

std::string replay_to_jsonl(const Replay &r) {
    const MatchResult &m = r.result;
    json h{{"type", "header"},
           {"engine_version", r.engine_version},
           {"map_hash", fmt::format("{:016x}", r.map_hash)},
           {"map", r.map_name},
           {"seed", r.seed},
           {"team_a", r.team_a},
           {"team_b", r.team_b},
           {"outcome", outcome_name(m.outcome)},
           {"reason", m.reason},
           {"final_tick", m.final_tick},
           {"stats", json::array({stats_to_json(m.stats[0]), stats_to_json(m.stats[1])})},
           {"crystals_collected", m.crystals_collected},
           {"crystals_total", m.crystals_total},
           {"events", m.events.size()}};
    std::string out = h.dump();
    out += '\n';
    for (const auto &e : m.events) {
        out += event_to_json(e).dump();
        out += '\n';
    }
    return out;
}

Replay replay_from_jsonl(std::string_view text, std::optional<std::uint64_t> expected_map_hash) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    Replay r;
    bool have_header = false;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw ReplayError(lineno, std::string("malformed JSON: ") + e.what());
        }
        try {
            const std::string type = j.at("type").get<std::string>();
            if (!have_header) {
                if (type != "header") throw ReplayError(lineno, "expected header line");
                r.engine_version = j.at("engine_version").get<std::string>();
                if (r.engine_version != kEngineVersion) {
                    throw ReplayIncompatible(lineno, "replay written by engine " + r.engine_version + ", this is " +
                                                         std::string(kEngineVersion));
                }
                r.map_hash = std::stoull(j.at("map_hash").get<std::string>(), nullptr, 16);
                if (expected_map_hash && *expected_map_hash != r.map_hash) {
                    throw ReplayIncompatible(lineno, fmt::format("map hash {:016x} does not match expected {:016x}",
                                                                 r.map_hash, *expected_map_hash));
                }
                r.map_name = j.value("map", std::string{});
                r.seed = j.at("seed").get<std::uint64_t>();
                r.team_a = j.value("team_a", std::string{});
                r.team_b = j.value("team_b", std::string{});
                const auto o = outcome_from_name(j.at("outcome").get<std::string>());
                if (!o) throw ReplayError(lineno, "unknown outcome");
                r.result.outcome = *o;
                r.result.winner = outcome_winner(*o);
                r.result.reason = j.at("reason").get<std::string>();
                r.result.final_tick = j.at("final_tick").get<Tick>();
                const auto &st = j.at("stats");
                if (!st.is_array() || st.size() != 2) throw ReplayError(lineno, "stats must hold two teams");
                r.result.stats = {stats_from_json(st[0]), stats_from_json(st[1])};
                r.result.crystals_collected = j.at("crystals_collected").get<int>();
                r.result.crystals_total = j.at("crystals_total").get<int>();
                declared = j.at("events").get<std::size_t>();
                have_header = true;
                continue;
            }
            if (type != "event") throw ReplayError(lineno, "unexpected line type '" + type + "'");
            GameEvent e = event_from_json(j);
            if (!r.result.events.empty() && e.tick < r.result.events.back().tick) {
                throw ReplayError(lineno, "event tick goes backwards");
            }
            if (!r.result.events.empty() && r.result.events.back().kind == EventKind::MatchEnd) {
                throw ReplayError(lineno, "event after match_end");
            }
            r.result.events.push_back(std::move(e));
        } catch (const ReplayError &) {
            throw;
        } catch (const std::exception &e) {
            throw ReplayError(lineno, e.what());
        }
    }
    if (!have_header) throw ReplayError(0, "empty replay");
    if (r.result.events.size() != declared) {
        throw ReplayError(lineno, fmt::format("header declares {} events, found {}", declared, r.result.events.size()));
    }
    if (r.result.events.empty() || r.result.events.back().kind != EventKind::MatchEnd) {
        throw ReplayError(lineno, "replay does not end with match_end");
    }
    return r;
}

void write_replay(const std::filesystem::path &path, const Replay &r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << replay_to_jsonl(r);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Replay load_replay(const std::filesystem::path &path, std::optional<std::uint64_t> expected_map_hash) {
    return replay_from_jsonl(read_text_file(path), expected_map_hash);
}

} // namespace arena
