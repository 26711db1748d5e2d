#include "arena/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace arena {

namespace {

// Parameter in [0, 1] where p->q first touches segment e, if it does.
std::optional<double> hit_param(Vec2 p, Vec2 q, const Segment &e) {
    const Vec2 r = q - p;
    const Vec2 s = e.b - e.a;
    const double denom = cross(r, s);
    const Vec2 ap = e.a - p;
    if (std::abs(denom) <= 1e-12) {
        if (std::abs(cross(ap, r)) > 1e-12) return std::nullopt;
        const double rr = dot(r, r);
        if (rr <= 0.0) return std::nullopt;
        double t0 = dot(e.a - p, r) / rr;
        double t1 = dot(e.b - p, r) / rr;
        if (t0 > t1) std::swap(t0, t1);
        if (t1 < 0.0 || t0 > 1.0) return std::nullopt;
        return std::max(0.0, t0);
    }
    const double t = cross(ap, s) / denom;
    const double u = cross(ap, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

// First parameter at which a point moving p->q touches a circle.
std::optional<double> circle_hit(Vec2 p, Vec2 q, Vec2 c, double radius) {
    const Vec2 f = p - c;
    const double cc = dot(f, f) - radius * radius;
    if (cc <= 0.0) return 0.0;
    const Vec2 r = q - p;
    const double a = dot(r, r);
    if (a <= 0.0) return std::nullopt;
    const double b = 2.0 * dot(r, f);
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) return std::nullopt;
    const double t = (-b - std::sqrt(disc)) / (2.0 * a);
    if (t < 0.0 || t > 1.0) return std::nullopt;
    return t;
}

std::int64_t winner_code(Outcome o) {
    switch (o) {
    case Outcome::WinnerA: return 0;
    case Outcome::WinnerB: return 1;
    default: return -1;
    }
}

} // namespace

// ---- Perception ---------------------------------------------------------

const Agent &Perception::self() const { return *engine_->world_.find(self_); }
Tick Perception::tick() const { return engine_->world_.tick; }
const RulesConfig &Perception::rules() const { return engine_->options_.rules; }
const Terrain &Perception::terrain() const { return engine_->world_.terrain; }
std::span<const Gate> Perception::gates() const { return engine_->world_.gates; }
std::span<const Projectile> Perception::projectiles() const { return engine_->world_.projectiles; }
std::span<const Crystal> Perception::crystals() const { return engine_->world_.crystals; }

const TeamStats &Perception::team_stats() const {
    return engine_->world_.stats[static_cast<std::size_t>(team_index(self().team))];
}

std::vector<const Agent *> Perception::allies() const {
    std::vector<const Agent *> out;
    const Agent &me = self();
    for (const auto &a : engine_->world_.agents) {
        if (a.alive && a.id != me.id && a.team == me.team) out.push_back(&a);
    }
    return out;
}

std::vector<const Agent *> Perception::visible_enemies(double range) const {
    const Agent &me = self();
    const double r = std::min(range, rules().sight_range);
    std::vector<std::pair<double, const Agent *>> found;
    for (const auto &a : engine_->world_.agents) {
        if (!a.alive || a.hp <= 0 || a.team != opponent(me.team)) continue;
        const double d = distance(me.position, a.position);
        if (d > r) continue;
        if (!clear(me.position, a.position, 0.0)) continue;
        found.push_back({d, &a});
    }
    std::stable_sort(found.begin(), found.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
    std::vector<const Agent *> out;
    for (auto &[d, a] : found) out.push_back(a);
    return out;
}

std::vector<const Agent *> Perception::enemy_structures() const {
    std::vector<const Agent *> out;
    const Team enemy = opponent(self().team);
    for (const auto &a : engine_->world_.agents) {
        if (a.alive && a.team == enemy && a.is_structure()) out.push_back(&a);
    }
    return out;
}

const Agent *Perception::own_base() const {
    for (const auto &a : engine_->world_.agents) {
        if (a.kind == AgentKind::Base && a.team == self().team) return &a;
    }
    return nullptr;
}

const Agent *Perception::enemy_base() const {
    for (const auto &a : engine_->world_.agents) {
        if (a.kind == AgentKind::Base && a.team == opponent(self().team)) return &a;
    }
    return nullptr;
}

bool Perception::clear(Vec2 a, Vec2 b, double clearance) const {
    return engine_->nav_->los().clear(a, b, clearance, engine_->walls_);
}

std::optional<Vec2> Perception::nav_target() const {
    auto it = engine_->slots_.find(self_);
    if (it == engine_->slots_.end() || !it->second.navigator) return std::nullopt;
    return it->second.navigator->target();
}

bool Perception::weapon_ready(WeaponSlot slot) const {
    const Agent &me = self();
    return me.weapon(slot).has_value() && tick() >= me.weapon_ready_tick[static_cast<std::size_t>(slot)];
}

bool Perception::dodge_ready() const {
    const Agent &me = self();
    return me.dodge_distance > 0.0 && tick() >= me.dodge_ready_tick;
}

int Perception::weapon_damage(WeaponSlot slot) const {
    const Agent &me = self();
    if (!me.weapon(slot)) return 0;
    return scaled_damage(me.weapon(slot)->damage, me.level, rules());
}

// ---- AgentApi -----------------------------------------------------------

bool AgentApi::move_to(Vec2 p) {
    if (!engine_->accept_call(id_, "move_to")) return false;
    if (!is_finite(p) || !engine_->world_.terrain.bounds.contains(p)) return false;
    engine_->slots_[id_].pending.push_back({Engine::Command::Kind::Move, p});
    return true;
}

bool AgentApi::stop() {
    if (!engine_->accept_call(id_, "stop")) return false;
    engine_->slots_[id_].pending.push_back({Engine::Command::Kind::Stop, {}});
    return true;
}

bool AgentApi::shoot(WeaponSlot slot) {
    if (!engine_->accept_call(id_, "shoot")) return false;
    const Agent *a = engine_->world_.find(id_);
    auto &s = engine_->slots_[id_];
    const auto i = static_cast<std::size_t>(slot);
    if (!a->weapon(slot) || engine_->world_.tick < a->weapon_ready_tick[i] || s.pending_shot[i]) return false;
    s.pending_shot[i] = true;
    Engine::Command c{Engine::Command::Kind::Shoot, {}};
    c.slot = slot;
    s.pending.push_back(c);
    return true;
}

bool AgentApi::turn_to(double theta) {
    if (!engine_->accept_call(id_, "turn_to")) return false;
    if (!std::isfinite(theta)) return false;
    auto &s = engine_->slots_[id_];
    s.pending_facing = theta;
    Engine::Command c{Engine::Command::Kind::Turn, {}};
    c.angle = theta;
    s.pending.push_back(c);
    return true;
}

bool AgentApi::face(Vec2 p) {
    const Agent *a = engine_->world_.find(id_);
    if (!a) return false;
    const Vec2 d = p - a->position;
    if (dot(d, d) <= 0.0) return false;
    return turn_to(std::atan2(d.y, d.x));
}

bool AgentApi::dodge(DodgeSide side) {
    if (!engine_->accept_call(id_, "dodge")) return false;
    const Agent *a = engine_->world_.find(id_);
    auto &s = engine_->slots_[id_];
    if (a->dodge_distance <= 0.0 || engine_->world_.tick < a->dodge_ready_tick || s.pending_dodge) return false;
    Vec2 perp{-std::sin(s.pending_facing), std::cos(s.pending_facing)};
    if (side == DodgeSide::Right) perp = -perp;
    const Vec2 dest = a->position + perp * a->dodge_distance;
    if (!engine_->nav_->los().clear(a->position, dest, a->radius, engine_->walls_)) return false;
    s.pending_dodge = true;
    Engine::Command c{Engine::Command::Kind::Dodge, dest};
    c.side = side;
    s.pending.push_back(c);
    return true;
}

SplitMix64 &AgentApi::rng() { return engine_->slots_[id_].rng; }

// ---- ControllerBundle ---------------------------------------------------

std::string ControllerBundle::navigator_for(AgentKind kind) const {
    auto it = navigators.find(kind);
    return it == navigators.end() ? std::string("astar") : it->second;
}

// ---- Engine -------------------------------------------------------------

Engine::Engine(const MapFile &map, ControllerBundle team_a, ControllerBundle team_b, EngineOptions options)
    : map_(map), team_a_(std::move(team_a)), team_b_(std::move(team_b)), options_(std::move(options)) {
    validate_map(map_);
    nav_ = options_.nav ? options_.nav : std::make_shared<const NavData>(map_);
    world_.terrain = map_.terrain();
    world_.rng = SplitMix64(options_.seed);
    for (std::size_t i = 0; i < map_.gates.size(); ++i) {
        const auto &spec = map_.gates[i];
        Gate g;
        g.id = static_cast<int>(i);
        g.segment = spec.segment;
        g.open = spec.open;
        g.toggle_period_ticks = spec.period_ticks;
        g.phase = static_cast<int>(world_.rng.below(static_cast<std::uint64_t>(spec.period_ticks)));
        g.next_toggle_tick = g.phase;
        world_.gates.push_back(g);
    }
    walls_ = world_.closed_walls();
    for (auto p : map_.crystals) world_.crystals.push_back({p, false});

    auto field_team = [&](const std::optional<TeamLayout> &layout, Team team) {
        if (!layout) return;
        const ControllerBundle &b = bundle(team);
        spawn(make_agent(AgentKind::Base, team, layout->base), &b);
        for (auto t : layout->towers) spawn(make_agent(AgentKind::Tower, team, t), &b);
        if (options_.rules.spawn_heroes && layout->hero_spawn && b.fields(AgentKind::Hero)) {
            spawn(make_agent(AgentKind::Hero, team, *layout->hero_spawn), &b);
        }
    };
    field_team(map_.team_a, Team::A);
    field_team(map_.team_b, Team::B);
    if (map_.gatherer_spawn && team_a_.fields(AgentKind::Gatherer)) {
        spawn(make_agent(AgentKind::Gatherer, Team::A, *map_.gatherer_spawn), &team_a_);
    }
}

Agent Engine::make_agent(AgentKind kind, Team team, Vec2 pos) const {
    const RulesConfig &r = options_.rules;
    const UnitSpec *spec = &r.minion;
    switch (kind) {
    case AgentKind::Minion: spec = &r.minion; break;
    case AgentKind::Hero: spec = &r.hero; break;
    case AgentKind::Tower: spec = &r.tower; break;
    case AgentKind::Base: spec = &r.base; break;
    case AgentKind::Gatherer: spec = &r.gatherer; break;
    }
    Agent a;
    a.team = team;
    a.kind = kind;
    a.position = pos;
    a.home = pos;
    a.radius = spec->radius;
    a.hp = a.max_hp = spec->hp;
    a.speed = (kind == AgentKind::Tower || kind == AgentKind::Base) ? 0.0 : spec->speed;
    a.weapons = {spec->weapon1, spec->weapon2};
    if (kind == AgentKind::Hero) {
        a.dodge_distance = r.dodge_distance;
        a.dodge_cooldown_ticks = r.dodge_cooldown_ticks;
    }
    const std::optional<TeamLayout> &enemy = team == Team::A ? map_.team_b : map_.team_a;
    if (enemy) {
        const Vec2 d = enemy->base - pos;
        if (dot(d, d) > 0.0) a.facing = std::atan2(d.y, d.x);
    }
    return a;
}

AgentId Engine::spawn(Agent agent, const ControllerBundle *b) {
    agent.id = world_.next_agent_id++;
    Slot slot;
    slot.rng = SplitMix64(SplitMix64::mix(options_.seed ^ (0xA24BAED4963EE407ull * static_cast<std::uint64_t>(agent.id + 1))));
    if (agent.kind == AgentKind::Tower) {
        if (b && b->fields(AgentKind::Tower)) {
            slot.controller = b->controllers.at(AgentKind::Tower)();
        } else {
            slot.controller = std::make_unique<TowerController>();
        }
    } else if (agent.kind != AgentKind::Base && b && b->fields(agent.kind)) {
        slot.controller = b->controllers.at(agent.kind)();
    }
    if (agent.mobile()) {
        slot.navigator = nav_->make_navigator(b ? b->navigator_for(agent.kind) : std::string("astar"), agent);
    }
    const AgentId id = agent.id;
    world_.agents.push_back(std::move(agent));
    slots_.emplace(id, std::move(slot));
    emit(EventKind::Spawn, world_.agents.back());
    return id;
}

AgentId Engine::add_agent(Agent agent, std::unique_ptr<Controller> controller, std::unique_ptr<Navigator> navigator) {
    agent.id = world_.next_agent_id++;
    Slot slot;
    slot.rng = SplitMix64(SplitMix64::mix(options_.seed ^ (0xA24BAED4963EE407ull * static_cast<std::uint64_t>(agent.id + 1))));
    slot.controller = std::move(controller);
    slot.navigator = std::move(navigator);
    if (!slot.navigator && agent.mobile()) slot.navigator = std::make_unique<DirectNavigator>();
    const AgentId id = agent.id;
    world_.agents.push_back(std::move(agent));
    slots_.emplace(id, std::move(slot));
    emit(EventKind::Spawn, world_.agents.back());
    return id;
}

Navigator *Engine::navigator(AgentId id) {
    auto it = slots_.find(id);
    return it == slots_.end() ? nullptr : it->second.navigator.get();
}

Controller *Engine::controller(AgentId id) {
    auto it = slots_.find(id);
    return it == slots_.end() ? nullptr : it->second.controller.get();
}

NavContext Engine::nav_context(const Agent &agent) {
    return NavContext{world_, agent, nav_->los(), walls_, &world_.event_log};
}

void Engine::log(GameEvent ev) { world_.event_log.push_back(std::move(ev)); }

void Engine::emit(EventKind kind, const Agent &a, AgentId other, std::int64_t amount, std::string detail) {
    GameEvent ev;
    ev.tick = world_.tick;
    ev.kind = kind;
    ev.agent = a.id;
    ev.other = other;
    ev.amount = amount;
    ev.team = a.team;
    ev.agent_kind = a.kind;
    ev.position = a.position;
    ev.detail = std::move(detail);
    log(std::move(ev));
}

bool Engine::accept_call(AgentId id, const char *what) {
    const Agent *a = world_.find(id);
    if (active_slot_ != id || !a) {
        GameEvent ev;
        ev.tick = world_.tick;
        ev.kind = EventKind::RejectedCallback;
        ev.agent = id;
        ev.other = active_slot_;
        ev.detail = what;
        if (a) {
            ev.team = a->team;
            ev.agent_kind = a->kind;
            ev.position = a->position;
        }
        log(std::move(ev));
        return false;
    }
    return a->alive;
}

void Engine::step() {
    if (ended_) return;
    phase_gates();
    walls_ = world_.closed_walls();
    phase_controllers();
    phase_navigation();
    phase_projectiles();
    phase_rules();
    phase_victory();
    ++world_.tick;
}

void Engine::phase_gates() {
    const Tick t = world_.tick;
    for (auto &g : world_.gates) {
        if (t < g.next_toggle_tick) continue;
        if (g.open) {
            bool occupied = false;
            for (const auto &a : world_.agents) {
                if (a.alive && a.mobile() && point_segment_distance(a.position, g.segment) <= a.radius + kEpsilon) {
                    occupied = true;
                    break;
                }
            }
            if (occupied) continue; // closing waits until the gate is clear
        }
        g.open = !g.open;
        ++g.toggles;
        const auto period = static_cast<std::uint64_t>(g.toggle_period_ticks);
        g.next_toggle_tick = t + std::max<Tick>(1, static_cast<Tick>(period / 2 + world_.rng.below(period)));
        GameEvent ev;
        ev.tick = t;
        ev.kind = EventKind::GateToggle;
        ev.amount = g.id;
        ev.team = Team::Neutral;
        ev.position = g.segment.midpoint();
        ev.detail = g.open ? "open" : "closed";
        log(std::move(ev));
    }
}

void Engine::phase_controllers() {
    std::vector<AgentId> order;
    for (const auto &a : world_.agents) {
        if (a.alive) order.push_back(a.id);
    }
    for (AgentId id : order) {
        Agent *a = world_.find(id);
        if (!a || !a->alive) continue;
        auto it = slots_.find(id);
        if (it == slots_.end() || !it->second.controller) continue;
        Slot &s = it->second;
        s.pending.clear();
        s.pending_facing = a->facing;
        s.pending_shot = {false, false};
        s.pending_dodge = false;
        Perception view(*this, id);
        AgentApi api(*this, id);
        bool ok = false;
        std::string fault;
        active_slot_ = id;
        try {
            if (!s.started) {
                s.started = true;
                s.controller->on_spawn(view, api);
            }
            s.controller->on_tick(view, api);
            ok = true;
        } catch (const std::exception &e) {
            fault = e.what();
        } catch (...) {
            fault = "unknown exception";
        }
        active_slot_ = kNoAgent;
        a = world_.find(id);
        if (ok) {
            commit(*a, s);
        } else {
            s.pending.clear();
            emit(EventKind::ControllerFault, *a, kNoAgent, 0, fault);
        }
    }
}

void Engine::commit(Agent &agent, Slot &slot) {
    for (const auto &c : slot.pending) {
        switch (c.kind) {
        case Command::Kind::Move:
            if (slot.navigator) {
                NavContext ctx = nav_context(agent);
                slot.navigator->set_target(ctx, c.point);
            }
            break;
        case Command::Kind::Stop:
            if (slot.navigator) slot.navigator->clear_target();
            agent.nav_status = NavStatus::Idle;
            break;
        case Command::Kind::Turn:
            agent.facing = c.angle;
            slot.turned = true;
            break;
        case Command::Kind::Shoot: {
            const auto i = static_cast<std::size_t>(c.slot);
            const auto &w = agent.weapons[i];
            if (!w || world_.tick < agent.weapon_ready_tick[i]) break;
            Projectile p;
            p.id = world_.next_projectile_id++;
            p.owner_id = agent.id;
            p.team = agent.team;
            p.position = agent.position;
            p.velocity = agent.facing_dir() * w->projectile_speed;
            p.damage = scaled_damage(w->damage, agent.level, options_.rules);
            p.range_remaining = w->range;
            world_.projectiles.push_back(p);
            agent.weapon_ready_tick[i] = world_.tick + w->cooldown_ticks;
            break;
        }
        case Command::Kind::Dodge:
            if (nav_->los().clear(agent.position, c.point, agent.radius, walls_)) {
                agent.position = c.point;
                agent.dodge_ready_tick = world_.tick + agent.dodge_cooldown_ticks;
            }
            break;
        }
    }
    slot.pending.clear();
}

void Engine::phase_navigation() {
    for (auto &agent : world_.agents) {
        agent.velocity = {};
        auto it = slots_.find(agent.id);
        if (it == slots_.end()) continue;
        Slot &s = it->second;
        const bool turned = s.turned;
        s.turned = false;
        if (!agent.alive || !agent.mobile() || !s.navigator) continue;
        NavStep st;
        try {
            NavContext ctx = nav_context(agent);
            st = s.navigator->update(ctx);
        } catch (const std::exception &e) {
            emit(EventKind::ControllerFault, agent, kNoAgent, 0, std::string("navigator: ") + e.what());
            continue;
        }
        agent.nav_status = st.status;
        if (st.status != NavStatus::Moving) continue;
        const Vec2 d = st.next - agent.position;
        const double len = length(d);
        if (len <= 0.0) continue;
        const Vec2 dest = len <= agent.speed ? st.next : agent.position + d * (agent.speed / len);
        if (!nav_->los().clear(agent.position, dest, agent.radius, walls_)) continue;
        agent.velocity = dest - agent.position;
        agent.position = dest;
        if (!turned) agent.facing = std::atan2(d.y, d.x);
    }
}

void Engine::phase_projectiles() {
    const Terrain &terrain = world_.terrain;
    const Rect &b = terrain.bounds;
    const std::array<Segment, 4> sides{Segment{{b.min_x, b.min_y}, {b.max_x, b.min_y}},
                                       Segment{{b.max_x, b.min_y}, {b.max_x, b.max_y}},
                                       Segment{{b.max_x, b.max_y}, {b.min_x, b.max_y}},
                                       Segment{{b.min_x, b.max_y}, {b.min_x, b.min_y}}};
    std::vector<Projectile> survivors;
    survivors.reserve(world_.projectiles.size());
    for (auto &p : world_.projectiles) {
        const double speed = length(p.velocity);
        const double travel = std::min(speed, p.range_remaining);
        const Vec2 q = speed > 0.0 ? p.position + p.velocity * (travel / speed) : p.position;
        const Segment path{p.position, q};
        const Rect box = bounding_box(path).inflated(kEpsilon);

        double t_wall = 2.0;
        auto consider = [&](const Segment &e) {
            if (!box.overlaps(bounding_box(e), 0.0)) return;
            if (auto t = hit_param(p.position, q, e)) t_wall = std::min(t_wall, *t);
        };
        for (const auto &poly : terrain.obstacles) {
            for (std::size_t i = 0; i < poly.size(); ++i) consider(poly.edge(i));
        }
        for (const auto &w : walls_) consider(w);
        for (const auto &s : sides) consider(s);

        Agent *target = nullptr;
        double t_agent = 2.0;
        for (auto &a : world_.agents) {
            if (!a.alive || a.hp <= 0 || a.team != opponent(p.team)) continue;
            if (point_segment_distance(a.position, path) > a.radius) continue;
            if (auto t = circle_hit(p.position, q, a.position, a.radius); t && *t < t_agent) {
                t_agent = *t;
                target = &a;
            }
        }
        if (target && t_agent <= t_wall) {
            const int amount = std::min(p.damage, target->hp);
            target->hp -= amount;
            last_hit_by_[target->id] = p.owner_id;
            emit(EventKind::Damage, *target, p.owner_id, amount);
            auto &mine = world_.stats[static_cast<std::size_t>(team_index(p.team))];
            mine.damage_dealt += amount;
            if (target->is_structure()) {
                mine.structure_damage_dealt += amount;
                world_.stats[static_cast<std::size_t>(team_index(target->team))].structure_damage_taken += amount;
            }
            continue;
        }
        if (t_wall <= 1.0) continue;
        p.position = q;
        p.range_remaining -= travel;
        if (p.range_remaining <= kEpsilon) continue;
        survivors.push_back(p);
    }
    world_.projectiles = std::move(survivors);
}

Vec2 Engine::minion_spawn_point(const Agent &base) {
    Vec2 dir{1.0, 0.0};
    const std::optional<TeamLayout> &enemy = base.team == Team::A ? map_.team_b : map_.team_a;
    if (enemy) {
        const Vec2 d = enemy->base - base.position;
        if (dot(d, d) > 0.0) dir = normalized(d);
    }
    const double r = options_.rules.minion.radius;
    const Vec2 ahead = base.position + dir * (base.radius + r + 0.5);
    const double jitter = world_.rng.uniform(-1.5, 1.5);
    const Vec2 cand = ahead + perpendicular(dir) * jitter;
    const LineOfSight &los = nav_->los();
    if (los.clear(cand, cand, r, walls_)) return cand;
    if (los.clear(ahead, ahead, r, walls_)) return ahead;
    return base.position;
}

void Engine::phase_rules() {
    const RulesConfig &r = options_.rules;
    const Tick t = world_.tick;

    for (auto &a : world_.agents) {
        if (!a.alive || a.kind != AgentKind::Gatherer) continue;
        for (std::size_t i = 0; i < world_.crystals.size(); ++i) {
            auto &c = world_.crystals[i];
            if (c.collected || distance(a.position, c.position) > a.radius + r.crystal_radius) continue;
            c.collected = true;
            emit(EventKind::CrystalCollected, a, kNoAgent, static_cast<std::int64_t>(i));
        }
    }

    std::vector<AgentId> removed;
    for (std::size_t idx = 0; idx < world_.agents.size(); ++idx) {
        Agent &a = world_.agents[idx];
        if (!a.alive || a.hp > 0) continue;
        a.alive = false;
        a.died_tick = t;
        a.velocity = {};
        auto hit = last_hit_by_.find(a.id);
        a.killed_by = hit == last_hit_by_.end() ? kNoAgent : hit->second;
        emit(EventKind::Death, a, a.killed_by);
        if (a.team != Team::Neutral) ++world_.stats[static_cast<std::size_t>(team_index(opponent(a.team)))].kills;
        if (auto sl = slots_.find(a.id); sl != slots_.end() && sl->second.navigator) sl->second.navigator->clear_target();
        if (Agent *killer = world_.find(a.killed_by)) {
            ++killer->kills;
            if (killer->alive && killer->kind == AgentKind::Hero &&
                (a.kind == AgentKind::Hero || a.kind == AgentKind::Tower) && killer->level < r.max_level) {
                ++killer->level;
                killer->max_hp += r.level_hp_bonus;
                killer->hp += r.level_hp_bonus;
                emit(EventKind::LevelUp, *killer, a.id, killer->level);
            }
        }
        // killer lookup may not invalidate `a`: agents are not resized here
        Agent &dead = world_.agents[idx];
        if (dead.kind == AgentKind::Base) emit(EventKind::BaseDestroyed, dead, dead.killed_by);
        if (dead.kind == AgentKind::Hero) dead.respawn_tick = t + r.respawn_ticks;
        if (dead.kind == AgentKind::Minion || dead.kind == AgentKind::Gatherer) removed.push_back(dead.id);
    }
    if (!removed.empty()) {
        std::erase_if(world_.agents, [&](const Agent &a) {
            return std::find(removed.begin(), removed.end(), a.id) != removed.end();
        });
        for (AgentId id : removed) {
            slots_.erase(id);
            last_hit_by_.erase(id);
        }
    }

    for (auto &a : world_.agents) {
        if (a.alive || a.kind != AgentKind::Hero || a.respawn_tick < 0 || a.respawn_tick > t) continue;
        a.alive = true;
        a.level = 1;
        a.hp = a.max_hp = r.hero.hp;
        a.position = a.home;
        a.respawn_tick = -1;
        last_hit_by_.erase(a.id);
        if (auto sl = slots_.find(a.id); sl != slots_.end()) {
            sl->second.started = false;
            if (sl->second.navigator) sl->second.navigator->clear_target();
        }
        emit(EventKind::Respawn, a);
    }

    if (r.spawn_minions && t % r.spawn_period_ticks == 0) {
        for (Team team : {Team::A, Team::B}) {
            const ControllerBundle &b = bundle(team);
            if (!b.fields(AgentKind::Minion)) continue;
            const Agent *base = nullptr;
            for (const auto &a : world_.agents) {
                if (a.kind == AgentKind::Base && a.team == team && a.alive) base = &a;
            }
            if (!base) continue;
            const Agent base_copy = *base;
            spawn(make_agent(AgentKind::Minion, team, minion_spawn_point(base_copy)), &b);
            ++world_.stats[static_cast<std::size_t>(team_index(team))].minions_spawned;
        }
    }
}

void Engine::phase_victory() {
    if (ended_) return;
    if (map_.team_a || map_.team_b) {
        const Outcome o = victory_check(world_, false);
        if (o != Outcome::Ongoing) {
            end_match(o, "base_destroyed");
            return;
        }
    }
    if (!world_.crystals.empty() &&
        std::all_of(world_.crystals.begin(), world_.crystals.end(), [](const Crystal &c) { return c.collected; })) {
        end_match(Outcome::WinnerA, "crystals_collected");
    }
}

void Engine::end_match(Outcome o, const std::string &reason) {
    ended_ = true;
    outcome_ = o;
    reason_ = reason;
    GameEvent ev;
    ev.tick = world_.tick;
    ev.kind = EventKind::MatchEnd;
    ev.amount = winner_code(o);
    ev.team = outcome_winner(o).value_or(Team::Neutral);
    ev.detail = reason;
    log(std::move(ev));
}

void Engine::finish_at_limit() {
    if (ended_) return;
    end_match(victory_check(world_, true), "tick_limit");
}

MatchResult Engine::result() const {
    MatchResult r;
    r.outcome = outcome_;
    r.winner = outcome_winner(outcome_);
    r.reason = reason_;
    r.final_tick = world_.tick;
    r.events = world_.event_log;
    r.stats = world_.stats;
    r.crystals_total = static_cast<int>(world_.crystals.size());
    for (const auto &c : world_.crystals) r.crystals_collected += c.collected ? 1 : 0;
    return r;
}

MatchResult run_headless(const MapFile &map, const ControllerBundle &team_a, const ControllerBundle &team_b,
                         std::uint64_t seed, Tick max_ticks, const RulesConfig &rules,
                         std::shared_ptr<const NavData> nav) {
    if (max_ticks <= 0) throw std::invalid_argument("max_ticks must be positive");
    const auto start = std::chrono::steady_clock::now();
    Engine engine(map, team_a, team_b, EngineOptions{rules, seed, std::move(nav)});
    while (!engine.ended() && engine.world().tick < max_ticks) engine.step();
    engine.finish_at_limit();
    MatchResult r = engine.result();
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

double lead_angle(Vec2 shooter, Vec2 target, Vec2 v, double speed) {
    const Vec2 d = target - shooter;
    const double a = dot(v, v) - speed * speed;
    const double b = 2.0 * dot(d, v);
    const double c = dot(d, d);
    double t = -1.0;
    if (std::abs(a) < 1e-12) {
        if (std::abs(b) > 1e-12) t = -c / b;
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            const double t1 = (-b - s) / (2.0 * a);
            const double t2 = (-b + s) / (2.0 * a);
            const double lo = std::min(t1, t2);
            const double hi = std::max(t1, t2);
            t = lo > 0.0 ? lo : hi;
        }
    }
    const Vec2 aim = t > 0.0 ? d + v * t : d;
    return std::atan2(aim.y, aim.x);
}

void TowerController::on_tick(const Perception &view, AgentApi &api) {
    if (!view.weapon_ready(WeaponSlot::Primary)) return;
    const Weapon &w = *view.self().weapon(WeaponSlot::Primary);
    const auto targets = view.visible_enemies(w.range);
    if (targets.empty()) return;
    const Agent &t = *targets.front();
    api.turn_to(lead_angle(view.self().position, t.position, t.velocity, w.projectile_speed));
    api.shoot(WeaponSlot::Primary);
}

} // namespace arena
