#pragma once

#include "arena/controllers.hpp"
#include "arena/engine.hpp"
#include "arena/replay.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace arena {

// ---- bundles ------------------------------------------------------------------

/// {"name": str, "controllers": {kind: factory}, "navigators": {kind: navigator}}
ControllerBundle parse_bundle(std::string_view json_text, const std::string &default_name = "bundle");
ControllerBundle load_bundle(const std::filesystem::path &path);
std::string bundle_to_json(const ControllerBundle &b);
/// A bundle that fields nothing but the built-in structures.
ControllerBundle empty_bundle(const std::string &name = "do-nothing");

// ---- parallel matches ---------------------------------------------------------

struct MatchJob {
    std::shared_ptr<const MapFile> map;
    std::shared_ptr<const NavData> nav;
    const ControllerBundle *team_a = nullptr;
    const ControllerBundle *team_b = nullptr;
    std::uint64_t seed = 0;
    Tick max_ticks = 0;
    RulesConfig rules;
};

/// Worker count: `requested` (or the hardware concurrency when 0), capped by
/// the ARENA_THREADS environment variable when set.
int worker_count(int requested = 0);

/// Runs every job; results come back in job order whatever the completion
/// order. The first job exception is rethrown after all workers finish.
std::vector<MatchResult> run_matches(const std::vector<MatchJob> &jobs, int threads = 0);

// ---- scenarios and grading ------------------------------------------------------

struct Criterion {
    std::string id;
    /// enemy_base_destroyed | crystals_collected | wins | no_faults
    std::string type;
    std::string description;
    bool primary = false;
    std::optional<int> max_minions;
    std::optional<Tick> max_ticks;
    std::optional<int> min_wins;
};

struct Scenario {
    std::string id;
    std::string description;
    std::filesystem::path map_path;
    RulesConfig rules;
    std::vector<std::uint64_t> seeds;
    Tick max_ticks = 9000;
    Team side = Team::A;
    std::optional<std::filesystem::path> opponent_path; ///< empty team when absent
    std::vector<Criterion> criteria;
};

/// Relative paths inside the file resolve against the file's directory.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path &base_dir);
Scenario load_scenario(const std::filesystem::path &path);

struct CriterionReport {
    std::string id;
    std::string type;
    bool primary = false;
    bool passed = false;
    int seeds_passed = 0;
    int seeds_total = 0;
    double credit = 0.0; ///< 0..1
    std::vector<std::string> failures; ///< one line per failing seed
};

struct SeedSummary {
    std::uint64_t seed = 0;
    std::string outcome;
    std::string reason;
    Tick final_tick = 0;
    int minions_spawned = 0;
    int crystals_collected = 0;
    int crystals_total = 0;
    bool forfeited = false;
    std::string fault;
    std::vector<std::string> excerpt; ///< tail of the event log for failing seeds
};

struct GradeReport {
    std::string scenario;
    std::string bundle;
    std::vector<CriterionReport> criteria;
    std::vector<SeedSummary> seeds;
    double score = 0.0; ///< out of 10
    std::string diagnostic;
    bool error = false;

    bool passed() const;
    bool primary_passed() const;
};

GradeReport grade(const Scenario &scenario, const ControllerBundle &bundle, int threads = 0);
/// Report for a bundle that could not be loaded.
GradeReport grade_failure(const Scenario &scenario, const std::string &bundle, const std::string &diagnostic);
std::string report_to_json(const GradeReport &r);
std::string report_to_text(const GradeReport &r);

// ---- ladder --------------------------------------------------------------------

struct LadderConfig {
    std::shared_ptr<const MapFile> map;
    RulesConfig rules;
    std::vector<std::uint64_t> seeds;
    Tick max_ticks = 3600;
};

struct Standing {
    std::string name;
    int wins = 0;
    int draws = 0;
    int losses = 0;
    int head_to_head = 0; ///< wins against bundles tied on total wins
    std::int64_t structure_damage_dealt = 0;
    int rank = 0; ///< 1-based; equal keys share a rank
};

struct LadderResult {
    std::vector<std::string> names;        ///< sorted by name
    std::vector<std::vector<int>> wins;    ///< wins[i][j]: matches i won against j, either side
    std::vector<std::vector<int>> draws;
    std::vector<Standing> standings;       ///< ranking order
    int matches = 0;
};

/// Round robin: every ordered pair plays each seed, so each pairing is
/// played from both sides.
LadderResult run_ladder(std::vector<ControllerBundle> bundles, const LadderConfig &config, int threads = 0);
std::string ladder_to_json(const LadderResult &r);
std::string ladder_to_text(const LadderResult &r);

} // namespace arena
