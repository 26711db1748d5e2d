#include "arena/harness.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace arena {

using nlohmann::json;

// ---- bundles ------------------------------------------------------------------

ControllerBundle parse_bundle(std::string_view json_text, const std::string &default_name) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ValidationError("schema.json", e.what());
    }
    if (!j.is_object()) throw ValidationError("schema.object", "bundle must be a JSON object");
    ControllerBundle b;
    b.name = j.value("name", default_name);
    auto read_map = [&](const char *key, auto &&apply) {
        if (!j.contains(key)) return;
        if (!j[key].is_object()) throw ValidationError("bundle.schema", std::string(key) + " must be an object");
        for (const auto &[k, v] : j[key].items()) {
            const auto kind = kind_from_string(k);
            if (!kind) throw ValidationError("bundle.kind", "unknown agent kind '" + k + "'");
            if (!v.is_string()) throw ValidationError("bundle.schema", std::string(key) + "." + k + " must be a string");
            apply(*kind, v.template get<std::string>());
        }
    };
    read_map("controllers", [&](AgentKind kind, const std::string &name) {
        if (!known_controller(name)) throw ValidationError("bundle.controller", "unknown controller '" + name + "'");
        b.controllers[kind] = controller_factory(name);
        b.controller_names[kind] = name;
    });
    read_map("navigators", [&](AgentKind kind, const std::string &name) {
        if (!NavData::known_navigator(name)) throw ValidationError("bundle.navigator", "unknown navigator '" + name + "'");
        b.navigators[kind] = name;
    });
    return b;
}

ControllerBundle load_bundle(const std::filesystem::path &path) {
    return parse_bundle(read_text_file(path), path.stem().string());
}

std::string bundle_to_json(const ControllerBundle &b) {
    json c = json::object();
    for (const auto &[k, v] : b.controller_names) c[std::string(to_string(k))] = v;
    json n = json::object();
    for (const auto &[k, v] : b.navigators) n[std::string(to_string(k))] = v;
    return json{{"name", b.name}, {"controllers", c}, {"navigators", n}}.dump(2);
}

ControllerBundle empty_bundle(const std::string &name) {
    ControllerBundle b;
    b.name = name;
    return b;
}

// ---- parallel matches ---------------------------------------------------------

int worker_count(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char *env = std::getenv("ARENA_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

std::vector<MatchResult> run_matches(const std::vector<MatchJob> &jobs, int threads) {
    std::vector<MatchResult> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const MatchJob &job = jobs[i];
            try {
                results[i] = run_headless(*job.map, *job.team_a, *job.team_b, job.seed, job.max_ticks, job.rules, job.nav);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::min<int>(worker_count(threads), static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto &t : pool) t.join();
    }
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

// ---- scenarios ----------------------------------------------------------------

namespace {

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p) {
    std::filesystem::path q(p);
    return q.is_absolute() ? q : base / q;
}

std::string describe(const GameEvent &e) {
    std::string s = fmt::format("t={} {} agent={}", e.tick, to_string(e.kind), e.agent);
    if (e.agent >= 0) s += fmt::format(" ({} {})", to_string(e.team), to_string(e.agent_kind));
    if (e.other >= 0) s += fmt::format(" other={}", e.other);
    if (e.amount != 0) s += fmt::format(" amount={}", e.amount);
    if (!e.detail.empty()) s += " " + e.detail;
    return s;
}

} // namespace

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path &base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ValidationError("schema.json", e.what());
    }
    if (!j.is_object()) throw ValidationError("schema.object", "scenario must be a JSON object");
    Scenario s;
    try {
        s.id = j.at("id").get<std::string>();
        s.description = j.value("description", std::string{});
        s.map_path = resolve(base_dir, j.at("map").get<std::string>());
        if (j.contains("rules_file")) s.rules = load_rules(resolve(base_dir, j["rules_file"].get<std::string>()));
        if (j.contains("rules")) s.rules = parse_rules(j["rules"].dump(), s.rules);
        if (j.contains("seeds")) {
            s.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        } else {
            const int n = j.value("seed_count", 10);
            for (int i = 1; i <= n; ++i) s.seeds.push_back(static_cast<std::uint64_t>(i));
        }
        if (s.seeds.empty()) throw ValidationError("scenario.seeds", "scenario needs at least one seed");
        s.max_ticks = j.value("max_ticks", s.max_ticks);
        if (s.max_ticks <= 0) throw ValidationError("scenario.max_ticks", "max_ticks must be positive");
        const std::string side = j.value("side", std::string("A"));
        if (side != "A" && side != "B") throw ValidationError("scenario.side", "side must be A or B");
        s.side = side == "A" ? Team::A : Team::B;
        if (j.contains("opponent") && !j["opponent"].is_null()) {
            s.opponent_path = resolve(base_dir, j["opponent"].get<std::string>());
        }
        for (const auto &c : j.at("criteria")) {
            Criterion k;
            k.type = c.at("type").get<std::string>();
            k.id = c.value("id", k.type);
            k.description = c.value("description", std::string{});
            k.primary = c.value("primary", false);
            if (c.contains("max_minions")) k.max_minions = c["max_minions"].get<int>();
            if (c.contains("max_ticks")) k.max_ticks = c["max_ticks"].get<Tick>();
            if (c.contains("min_wins")) k.min_wins = c["min_wins"].get<int>();
            if (k.type != "enemy_base_destroyed" && k.type != "crystals_collected" && k.type != "wins" &&
                k.type != "no_faults") {
                throw ValidationError("scenario.criterion", "unknown criterion type '" + k.type + "'");
            }
            if (k.type == "wins" && !k.min_wins) throw ValidationError("scenario.criterion", "wins needs min_wins");
            s.criteria.push_back(std::move(k));
        }
    } catch (const json::exception &e) {
        throw ValidationError("scenario.schema", e.what());
    }
    if (s.criteria.empty()) throw ValidationError("scenario.criteria", "scenario needs at least one criterion");
    if (std::none_of(s.criteria.begin(), s.criteria.end(), [](const Criterion &c) { return c.primary; })) {
        s.criteria.front().primary = true;
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path &path) {
    return parse_scenario(read_text_file(path), path.parent_path());
}

// ---- grading ------------------------------------------------------------------

bool GradeReport::passed() const {
    return !error && std::all_of(criteria.begin(), criteria.end(), [](const CriterionReport &c) { return c.passed; });
}

bool GradeReport::primary_passed() const {
    if (error) return false;
    for (const auto &c : criteria) {
        if (c.primary && !c.passed) return false;
    }
    return true;
}

GradeReport grade_failure(const Scenario &scenario, const std::string &bundle, const std::string &diagnostic) {
    GradeReport r;
    r.scenario = scenario.id;
    r.bundle = bundle;
    r.diagnostic = diagnostic;
    r.error = true;
    for (const auto &c : scenario.criteria) {
        CriterionReport cr;
        cr.id = c.id;
        cr.type = c.type;
        cr.primary = c.primary;
        cr.seeds_total = static_cast<int>(scenario.seeds.size());
        cr.failures.push_back("bundle failed to load");
        r.criteria.push_back(std::move(cr));
    }
    return r;
}

GradeReport grade(const Scenario &scenario, const ControllerBundle &bundle, int threads) {
    std::shared_ptr<const MapFile> map;
    ControllerBundle opponent = empty_bundle();
    try {
        map = std::make_shared<const MapFile>(load_map(scenario.map_path));
        if (scenario.opponent_path) opponent = load_bundle(*scenario.opponent_path);
    } catch (const std::exception &e) {
        GradeReport r = grade_failure(scenario, bundle.name, std::string("scenario setup failed: ") + e.what());
        return r;
    }
    auto nav = std::make_shared<const NavData>(*map);
    const Team side = scenario.side;
    std::vector<MatchJob> jobs;
    for (auto seed : scenario.seeds) {
        MatchJob job;
        job.map = map;
        job.nav = nav;
        job.team_a = side == Team::A ? &bundle : &opponent;
        job.team_b = side == Team::A ? &opponent : &bundle;
        job.seed = seed;
        job.max_ticks = scenario.max_ticks;
        job.rules = scenario.rules;
        jobs.push_back(job);
    }
    std::vector<MatchResult> results;
    try {
        results = run_matches(jobs, threads);
    } catch (const std::exception &e) {
        return grade_failure(scenario, bundle.name, std::string("match failed: ") + e.what());
    }

    GradeReport report;
    report.scenario = scenario.id;
    report.bundle = bundle.name;
    const int si = team_index(side);
    std::vector<bool> seed_failed(results.size(), false);

    for (std::size_t k = 0; k < results.size(); ++k) {
        const MatchResult &m = results[k];
        SeedSummary s;
        s.seed = scenario.seeds[k];
        s.outcome = outcome_name(m.outcome);
        s.reason = m.reason;
        s.final_tick = m.final_tick;
        s.minions_spawned = m.stats[si].minions_spawned;
        s.crystals_collected = m.crystals_collected;
        s.crystals_total = m.crystals_total;
        for (const auto &e : m.events) {
            if (e.kind == EventKind::ControllerFault && e.team == side) {
                s.forfeited = true;
                s.fault = describe(e);
                break;
            }
        }
        report.seeds.push_back(std::move(s));
    }

    for (const auto &c : scenario.criteria) {
        CriterionReport cr;
        cr.id = c.id;
        cr.type = c.type;
        cr.primary = c.primary;
        cr.seeds_total = static_cast<int>(results.size());
        if (c.type == "wins") {
            int wins = 0;
            for (std::size_t k = 0; k < results.size(); ++k) {
                const bool won = !report.seeds[k].forfeited && results[k].winner == side;
                if (won) {
                    ++wins;
                } else {
                    cr.failures.push_back(fmt::format("seed {}: {} ({}){}", scenario.seeds[k], report.seeds[k].outcome,
                                                      report.seeds[k].reason,
                                                      report.seeds[k].forfeited ? ", forfeited" : ""));
                    seed_failed[k] = true;
                }
            }
            cr.seeds_passed = wins;
            cr.passed = wins >= *c.min_wins;
            cr.credit = std::min(1.0, static_cast<double>(wins) / std::max(1, *c.min_wins));
        } else {
            for (std::size_t k = 0; k < results.size(); ++k) {
                const MatchResult &m = results[k];
                const SeedSummary &s = report.seeds[k];
                std::string why;
                if (s.forfeited) {
                    why = "forfeited: " + s.fault;
                } else if (c.type == "enemy_base_destroyed") {
                    if (m.winner != side || m.reason != "base_destroyed") {
                        why = "base not destroyed";
                    } else if (c.max_minions && m.stats[si].minions_spawned >= *c.max_minions) {
                        why = fmt::format("used {} minions, budget {}", m.stats[si].minions_spawned, *c.max_minions);
                    }
                } else if (c.type == "crystals_collected") {
                    if (m.crystals_total == 0 || m.crystals_collected < m.crystals_total) {
                        why = fmt::format("collected {}/{} crystals", m.crystals_collected, m.crystals_total);
                    } else if (c.max_ticks && m.final_tick > *c.max_ticks) {
                        why = fmt::format("took {} ticks, budget {}", m.final_tick, *c.max_ticks);
                    }
                } else if (c.type == "no_faults") {
                    // forfeits are the only faults counted
                }
                if (why.empty()) {
                    ++cr.seeds_passed;
                } else {
                    cr.failures.push_back(fmt::format("seed {}: {}", scenario.seeds[k], why));
                    seed_failed[k] = true;
                }
            }
            cr.passed = cr.seeds_passed == cr.seeds_total;
            cr.credit = cr.seeds_total ? static_cast<double>(cr.seeds_passed) / cr.seeds_total : 0.0;
        }
        report.criteria.push_back(std::move(cr));
    }

    for (std::size_t k = 0; k < results.size(); ++k) {
        if (!seed_failed[k]) continue;
        const auto &ev = results[k].events;
        const std::size_t from = ev.size() > 8 ? ev.size() - 8 : 0;
        for (std::size_t i = from; i < ev.size(); ++i) report.seeds[k].excerpt.push_back(describe(ev[i]));
    }

    double sum = 0.0;
    for (const auto &c : report.criteria) sum += c.credit;
    report.score = report.criteria.empty() ? 0.0 : 10.0 * sum / static_cast<double>(report.criteria.size());
    return report;
}

std::string report_to_json(const GradeReport &r) {
    json crit = json::array();
    for (const auto &c : r.criteria) {
        crit.push_back({{"id", c.id},
                        {"type", c.type},
                        {"primary", c.primary},
                        {"passed", c.passed},
                        {"seeds_passed", c.seeds_passed},
                        {"seeds_total", c.seeds_total},
                        {"credit", c.credit},
                        {"failures", c.failures}});
    }
    json seeds = json::array();
    for (const auto &s : r.seeds) {
        json j{{"seed", s.seed},
               {"outcome", s.outcome},
               {"reason", s.reason},
               {"final_tick", s.final_tick},
               {"minions_spawned", s.minions_spawned},
               {"crystals", {s.crystals_collected, s.crystals_total}},
               {"forfeited", s.forfeited}};
        if (!s.fault.empty()) j["fault"] = s.fault;
        if (!s.excerpt.empty()) j["excerpt"] = s.excerpt;
        seeds.push_back(std::move(j));
    }
    json j{{"scenario", r.scenario},
           {"bundle", r.bundle},
           {"score", std::round(r.score * 100.0) / 100.0},
           {"passed", r.passed()},
           {"error", r.error},
           {"criteria", crit},
           {"matches", seeds}};
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    return j.dump(2);
}

std::string report_to_text(const GradeReport &r) {
    std::string out = fmt::format("scenario {}  bundle {}  score {:.2f}/10  {}\n", r.scenario, r.bundle, r.score,
                                  r.passed() ? "PASS" : "FAIL");
    if (!r.diagnostic.empty()) out += "  diagnostic: " + r.diagnostic + "\n";
    for (const auto &c : r.criteria) {
        out += fmt::format("  [{}] {}{} {}/{}\n", c.passed ? "pass" : "FAIL", c.id, c.primary ? " (primary)" : "",
                           c.seeds_passed, c.seeds_total);
        for (const auto &f : c.failures) out += "      " + f + "\n";
    }
    for (const auto &s : r.seeds) {
        if (s.excerpt.empty()) continue;
        out += fmt::format("  seed {} tail:\n", s.seed);
        for (const auto &e : s.excerpt) out += "      " + e + "\n";
    }
    return out;
}

// ---- ladder -------------------------------------------------------------------

LadderResult run_ladder(std::vector<ControllerBundle> bundles, const LadderConfig &config, int threads) {
    if (bundles.size() < 2) throw std::invalid_argument("a ladder needs at least two bundles");
    std::stable_sort(bundles.begin(), bundles.end(), [](const auto &a, const auto &b) { return a.name < b.name; });
    for (std::size_t i = 1; i < bundles.size(); ++i) {
        if (bundles[i].name == bundles[i - 1].name) throw std::invalid_argument("duplicate bundle name '" + bundles[i].name + "'");
    }
    const std::size_t n = bundles.size();
    auto nav = std::make_shared<const NavData>(*config.map);
    std::vector<MatchJob> jobs;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            for (auto seed : config.seeds) {
                jobs.push_back(MatchJob{config.map, nav, &bundles[i], &bundles[j], seed, config.max_ticks, config.rules});
                pairs.push_back({i, j});
            }
        }
    }
    const auto results = run_matches(jobs, threads);

    LadderResult r;
    r.matches = static_cast<int>(results.size());
    for (const auto &b : bundles) r.names.push_back(b.name);
    r.wins.assign(n, std::vector<int>(n, 0));
    r.draws.assign(n, std::vector<int>(n, 0));
    std::vector<std::int64_t> sdd(n, 0);
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto [a, b] = pairs[k];
        const MatchResult &m = results[k];
        if (m.outcome == Outcome::WinnerA) ++r.wins[a][b];
        else if (m.outcome == Outcome::WinnerB) ++r.wins[b][a];
        else {
            ++r.draws[a][b];
            ++r.draws[b][a];
        }
        sdd[a] += m.stats[0].structure_damage_dealt;
        sdd[b] += m.stats[1].structure_damage_dealt;
    }
    std::vector<Standing> st(n);
    for (std::size_t i = 0; i < n; ++i) {
        st[i].name = r.names[i];
        st[i].structure_damage_dealt = sdd[i];
        for (std::size_t j = 0; j < n; ++j) {
            st[i].wins += r.wins[i][j];
            st[i].losses += r.wins[j][i];
            st[i].draws += r.draws[i][j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && st[i].wins == st[j].wins) st[i].head_to_head += r.wins[i][j];
        }
    }
    auto key_less = [](const Standing &a, const Standing &b) {
        if (a.wins != b.wins) return a.wins > b.wins;
        if (a.head_to_head != b.head_to_head) return a.head_to_head > b.head_to_head;
        return a.structure_damage_dealt > b.structure_damage_dealt;
    };
    std::sort(st.begin(), st.end(), [&](const Standing &a, const Standing &b) {
        if (key_less(a, b)) return true;
        if (key_less(b, a)) return false;
        return a.name < b.name;
    });
    for (std::size_t i = 0; i < n; ++i) {
        st[i].rank = (i > 0 && !key_less(st[i - 1], st[i])) ? st[i - 1].rank : static_cast<int>(i) + 1;
    }
    r.standings = std::move(st);
    return r;
}

std::string ladder_to_json(const LadderResult &r) {
    json standings = json::array();
    for (const auto &s : r.standings) {
        standings.push_back({{"rank", s.rank},
                             {"name", s.name},
                             {"wins", s.wins},
                             {"draws", s.draws},
                             {"losses", s.losses},
                             {"head_to_head", s.head_to_head},
                             {"structure_damage_dealt", s.structure_damage_dealt}});
    }
    return json{{"names", r.names}, {"wins", r.wins}, {"draws", r.draws}, {"matches", r.matches}, {"standings", standings}}
        .dump(2);
}

std::string ladder_to_text(const LadderResult &r) {
    std::string out = fmt::format("{} matches\n", r.matches);
    out += fmt::format("{:>4}  {:<20} {:>5} {:>5} {:>5} {:>5} {:>8}\n", "rank", "bundle", "W", "D", "L", "h2h", "struct");
    for (const auto &s : r.standings) {
        out += fmt::format("{:>4}  {:<20} {:>5} {:>5} {:>5} {:>5} {:>8}\n", s.rank, s.name, s.wins, s.draws, s.losses,
                           s.head_to_head, s.structure_damage_dealt);
    }
    return out;
}

} // namespace arena
