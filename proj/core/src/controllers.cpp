#include "arena/controllers.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace arena {

namespace {

const Agent *find_structure(const Perception &view, AgentId id) {
    for (const Agent *a : view.enemy_structures()) {
        if (a->id == id) return a;
    }
    return nullptr;
}

/// Nearest standing enemy tower, else the enemy base.
const Agent *pick_objective(const Perception &view) {
    const Agent &me = view.self();
    const Agent *best = nullptr;
    double best_d = 0.0;
    for (const Agent *a : view.enemy_structures()) {
        if (a->kind != AgentKind::Tower) continue;
        const double d = distance(me.position, a->position);
        if (!best || d < best_d) {
            best = a;
            best_d = d;
        }
    }
    if (best) return best;
    for (const Agent *a : view.enemy_structures()) {
        if (a->kind == AgentKind::Base) return a;
    }
    return nullptr;
}

bool fire_led(const Perception &view, AgentApi &api, const Agent &target, WeaponSlot slot) {
    const Agent &me = view.self();
    const auto &w = me.weapon(slot);
    if (!w || !view.weapon_ready(slot)) return false;
    if (distance(me.position, target.position) > w->range) return false;
    api.turn_to(lead_angle(me.position, target.position, target.velocity, w->projectile_speed));
    return api.shoot(slot);
}

bool fire_direct(const Perception &view, AgentApi &api, const Agent &target, WeaponSlot slot) {
    const Agent &me = view.self();
    const auto &w = me.weapon(slot);
    if (!w || !view.weapon_ready(slot)) return false;
    if (distance(me.position, target.position) > w->range) return false;
    api.face(target.position);
    return api.shoot(slot);
}

const Agent *visible_hero(const Perception &view) {
    for (const Agent *a : view.visible_enemies()) {
        if (a->kind == AgentKind::Hero) return a;
    }
    return nullptr;
}

bool same_target(const Perception &view, Vec2 p, double tol) {
    const auto t = view.nav_target();
    return t && distance(*t, p) <= tol && view.nav_status() == NavStatus::Moving;
}

/// A short step from the agent in direction d, shortened until clear.
std::optional<Vec2> clear_step(const Perception &view, Vec2 d, double len) {
    const Agent &me = view.self();
    if (dot(d, d) <= 0.0) return std::nullopt;
    const Vec2 u = normalized(d);
    for (double l = len; l >= 1.0; l *= 0.5) {
        const Vec2 p = me.position + u * l;
        if (view.terrain().bounds.contains(p) && view.clear(me.position, p, me.radius)) return p;
    }
    return std::nullopt;
}

} // namespace

// ---- minion ------------------------------------------------------------------

StateMachine<MinionCtx> make_minion_machine() {
    using M = StateMachine<MinionCtx>;
    auto advance_to_objective = [](MinionCtx &c) {
        const Agent *obj = find_structure(c.view, c.mem.objective);
        if (!obj) {
            obj = pick_objective(c.view);
            c.mem.objective = obj ? obj->id : kNoAgent;
        }
        if (!obj) return;
        c.mem.objective_pos = obj->position;
        c.mem.ordered = c.view.tick();
        c.api.move_to(obj->position);
    };

    M::State advance{"Advance", advance_to_objective, nullptr, [advance_to_objective](MinionCtx &c) {
                         if (!find_structure(c.view, c.mem.objective)) return Transition::to("Retarget");
                         const double range = c.view.self().weapon(WeaponSlot::Primary)->range;
                         if (!c.view.visible_enemies(range).empty()) return Transition::to("Engage");
                         const bool stuck_retry = c.view.nav_status() == NavStatus::Stuck && c.view.tick() % 30 == 0;
                         const bool idle = c.view.nav_status() != NavStatus::Moving &&
                                           c.view.nav_status() != NavStatus::Stuck;
                         if (c.mem.ordered != c.view.tick() && (stuck_retry || idle)) {
                             advance_to_objective(c);
                         }
                         return Transition::stay();
                     }};

    M::State engage{"Engage", [](MinionCtx &c) { c.api.stop(); }, nullptr, [](MinionCtx &c) {
                        const double range = c.view.self().weapon(WeaponSlot::Primary)->range;
                        const auto targets = c.view.visible_enemies(range);
                        if (targets.empty()) {
                            return find_structure(c.view, c.mem.objective) ? Transition::to("Advance")
                                                                           : Transition::to("Retarget");
                        }
                        fire_led(c.view, c.api, *targets.front(), WeaponSlot::Primary);
                        return Transition::stay();
                    }};

    M::State retarget{"Retarget",
                      [](MinionCtx &c) {
                          const Agent *obj = pick_objective(c.view);
                          c.mem.objective = obj ? obj->id : kNoAgent;
                      },
                      nullptr, [](MinionCtx &) { return Transition::to("Advance"); }};

    return M({advance, engage, retarget}, "Advance");
}

MinionController::MinionController() : fsm_(make_minion_machine()) {}

void MinionController::on_spawn(const Perception &view, AgentApi &api) {
    mem_ = {};
    MinionCtx ctx{view, api, mem_};
    fsm_.start(ctx);
}

void MinionController::on_tick(const Perception &view, AgentApi &api) {
    MinionCtx ctx{view, api, mem_};
    fsm_.tick(ctx);
}

// ---- hero ----------------------------------------------------------------------

const Projectile *incoming_threat(const Perception &view, double horizon, double margin) {
    const Agent &me = view.self();
    const Projectile *best = nullptr;
    double best_t = 0.0;
    for (const auto &p : view.projectiles()) {
        if (p.team != opponent(me.team)) continue;
        const double vv = dot(p.velocity, p.velocity);
        if (vv <= 0.0) continue;
        const Vec2 r = me.position - p.position;
        const double t = dot(r, p.velocity) / vv;
        if (t < 0.0) continue;
        const double t_max = std::min(horizon, p.range_remaining / std::sqrt(vv));
        if (t > t_max + me.radius / std::sqrt(vv)) continue;
        const double tc = std::min(t, t_max);
        if (length(r - p.velocity * tc) >= me.radius + margin) continue;
        if (!view.clear(p.position, me.position, 0.0)) continue;
        if (!best || t < best_t) {
            best = &p;
            best_t = t;
        }
    }
    return best;
}

namespace {

void hero_fire(HeroCtx &c, const Agent &target) {
    const double d = distance(c.view.self().position, target.position);
    const auto &w1 = c.view.self().weapon(WeaponSlot::Primary);
    // the short weapon only when the target cannot step out of range first
    if (w1 && d <= w1->range - 0.5) fire_led(c.view, c.api(), target, WeaponSlot::Primary);
    fire_led(c.view, c.api(), target, WeaponSlot::Secondary);
}

const Agent *nearest_visible(const Perception &view) {
    const auto v = view.visible_enemies();
    return v.empty() ? nullptr : v.front();
}

BtStatus do_dodge(HeroCtx &c) {
    const Projectile *p = incoming_threat(c.view);
    if (!p) return BtStatus::Failure;
    const Agent &me = c.view.self();
    const Vec2 r = me.position - p->position;
    DodgeSide side = cross(p->velocity, r) >= 0.0 ? DodgeSide::Left : DodgeSide::Right;
    c.api().turn_to(std::atan2(p->velocity.y, p->velocity.x));
    bool ok = c.api().dodge(side);
    if (!ok) ok = c.api().dodge(side == DodgeSide::Left ? DodgeSide::Right : DodgeSide::Left);
    if (!ok) return BtStatus::Failure;
    c.mem.last_dodge = c.view.tick();
    if (const Agent *e = nearest_visible(c.view)) hero_fire(c, *e);
    return BtStatus::Success;
}

BtStatus do_kite(HeroCtx &c) {
    const Agent *e = visible_hero(c.view);
    if (!e) return BtStatus::Failure;
    const Agent &me = c.view.self();
    Vec2 away = me.position - e->position;
    if (const Agent *base = c.view.own_base()) away = normalized(away) + normalized(base->position - me.position) * 0.5;
    if (auto p = clear_step(c.view, away, 5.0)) {
        c.api().move_to(*p);
    } else if (auto q = clear_step(c.view, perpendicular(away) * static_cast<double>(c.mem.strafe_sign), 5.0)) {
        c.api().move_to(*q);
    } else {
        c.mem.strafe_sign = -c.mem.strafe_sign;
    }
    hero_fire(c, *e);
    return BtStatus::Success;
}

BtStatus do_engage(HeroCtx &c) {
    const Agent *e = visible_hero(c.view);
    if (!e) return BtStatus::Failure;
    const Agent &me = c.view.self();
    const double d = distance(me.position, e->position);
    const Vec2 to = e->position - me.position;
    const Tick now = c.view.tick();
    if (now >= c.mem.strafe_until) {
        c.mem.strafe_sign = c.api().rng().below(2) ? 1 : -1;
        c.mem.strafe_until = now + 12 + static_cast<Tick>(c.api().rng().below(20));
    }
    const auto &w2 = me.weapon(WeaponSlot::Secondary);
    const double far = w2 ? w2->range - 3.0 : 10.0;
    const bool enemy_weak = e->hp <= c.view.weapon_damage(WeaponSlot::Primary) && c.view.weapon_ready(WeaponSlot::Primary);
    Vec2 dir = perpendicular(to) * static_cast<double>(c.mem.strafe_sign);
    if (enemy_weak || d > far) {
        dir = normalized(to) * 2.0 + normalized(dir);
    } else if (d < 7.0) {
        dir = normalized(-to) * 2.0 + normalized(dir);
    }
    auto step = clear_step(c.view, dir, 4.0);
    if (!step) {
        c.mem.strafe_sign = -c.mem.strafe_sign;
        step = clear_step(c.view, perpendicular(to) * static_cast<double>(c.mem.strafe_sign), 4.0);
    }
    if (step) {
        c.api().move_to(*step);
    } else if (!same_target(c.view, e->position, 1.0)) {
        c.api().move_to(e->position);
    }
    hero_fire(c, *e);
    return BtStatus::Success;
}

BtStatus do_siege(HeroCtx &c) {
    const Agent &me = c.view.self();
    const Agent *target = pick_objective(c.view);
    if (!target) return BtStatus::Failure;
    const auto &w1 = me.weapon(WeaponSlot::Primary);
    const double stand = w1 ? std::max(0.5, w1->range - 1.0) : 3.0;
    Vec2 off = me.position - target->position;
    if (dot(off, off) <= 0.0) off = {1.0, 0.0};
    const Vec2 spot = target->position + normalized(off) * stand;
    if (distance(me.position, spot) > 0.5 && !same_target(c.view, spot, 0.5)) c.api().move_to(spot);
    if (const Agent *e = nearest_visible(c.view); e && e->kind != AgentKind::Base && e->kind != AgentKind::Tower) {
        hero_fire(c, *e);
    } else {
        hero_fire(c, *target);
    }
    return BtStatus::Success;
}

/// Our base was hit recently and theirs would not fall first.
bool losing_race(const HeroCtx &c) {
    if (c.view.tick() - c.mem.base_hit_tick > 90) return false;
    const Agent *own = c.view.own_base();
    if (!own) return false;
    int theirs = 0;
    for (const Agent *s : c.view.enemy_structures()) theirs += s->hp;
    return own->hp <= theirs;
}

BtStatus do_return(HeroCtx &c) {
    const Agent *own = c.view.own_base();
    const Agent *enemy = c.view.enemy_base();
    if (!own) return BtStatus::Failure;
    Vec2 dir{1.0, 0.0};
    if (enemy && distance(enemy->position, own->position) > 0.0) dir = normalized(enemy->position - own->position);
    const Vec2 spot = own->position + dir * (own->radius + 4.0);
    if (distance(c.view.self().position, spot) < 1.5) return BtStatus::Success;
    if (!same_target(c.view, spot, 1.0)) c.api().move_to(spot);
    return BtStatus::Running;
}

} // namespace

BtNode<HeroCtx> make_hero_tree() {
    using C = HeroCtx;
    return bt_choice<C>(
        "hero",
        {bt_sequence<C>("evade", {bt_condition<C>("threatened",
                                                  [](const C &c) { return c.view.dodge_ready() && incoming_threat(c.view); }),
                                  bt_action<C>("dodge", do_dodge)}),
         bt_sequence<C>("fall_back", {bt_condition<C>("hurt",
                                                      [](const C &c) {
                                                          const Agent &me = c.view.self();
                                                          return me.hp * 10 < me.max_hp * 3;
                                                      }),
                                      bt_condition<C>("hero_in_sight", [](const C &c) { return visible_hero(c.view) != nullptr; }),
                                      bt_action<C>("kite", do_kite)}),
         bt_sequence<C>("duel", {bt_condition<C>("hero_in_sight", [](const C &c) { return visible_hero(c.view) != nullptr; }),
                                 bt_action<C>("engage", do_engage)}),
         bt_sequence<C>("defend", {bt_condition<C>("losing_race", losing_race),
                                   bt_action<C>("return", do_return)}),
         bt_sequence<C>("push", {bt_condition<C>("structure_standing",
                                                 [](const C &c) { return !c.view.enemy_structures().empty(); }),
                                 bt_action<C>("siege", do_siege)}),
         bt_action<C>("idle", [](C &c) {
             if (c.view.nav_status() == NavStatus::Moving) c.api().stop();
             return BtStatus::Success;
         })});
}

HeroController::HeroController() : tree_(make_hero_tree()) {}

void HeroController::on_spawn(const Perception &view, AgentApi &api) {
    HeroCtx ctx(view, api, mem_);
    tree_.reset(ctx);
    mem_ = {};
}

void HeroController::on_tick(const Perception &view, AgentApi &api) {
    if (const Agent *own = view.own_base()) {
        if (mem_.last_base_hp >= 0 && own->hp < mem_.last_base_hp) mem_.base_hit_tick = view.tick();
        mem_.last_base_hp = own->hp;
    }
    HeroCtx ctx(view, api, mem_);
    tree_.tick(ctx);
}

// ---- baselines -------------------------------------------------------------------

void TurretHero::on_tick(const Perception &view, AgentApi &api) {
    const Agent *t = nearest_visible(view);
    if (!t) return;
    fire_direct(view, api, *t, WeaponSlot::Primary);
    fire_direct(view, api, *t, WeaponSlot::Secondary);
}

void RusherHero::on_tick(const Perception &view, AgentApi &api) {
    const Agent *t = visible_hero(view);
    if (!t) t = view.enemy_base();
    if (!t || !t->alive) return;
    if (!same_target(view, t->position, 1.0)) api.move_to(t->position);
    fire_direct(view, api, *t, WeaponSlot::Primary);
    fire_direct(view, api, *t, WeaponSlot::Secondary);
}

void KiterHero::on_tick(const Perception &view, AgentApi &api) {
    const Agent &me = view.self();
    if (view.dodge_ready()) {
        if (const Projectile *p = incoming_threat(view, 6.0, 0.3)) {
            api.turn_to(std::atan2(p->velocity.y, p->velocity.x));
            if (!api.dodge(DodgeSide::Left)) api.dodge(DodgeSide::Right);
        }
    }
    const Agent *e = visible_hero(view);
    if (e) {
        const double d = distance(me.position, e->position);
        if (view.tick() - last_order_ >= 10) {
            if (d < 9.0) {
                if (auto p = clear_step(view, me.position - e->position, 5.0)) api.move_to(*p);
                else api.move_to(e->position + perpendicular(me.position - e->position));
            } else if (d > 13.0) {
                api.move_to(e->position);
            } else {
                api.stop();
            }
            last_order_ = view.tick();
        }
        fire_led(view, api, *e, WeaponSlot::Secondary);
        fire_led(view, api, *e, WeaponSlot::Primary);
        return;
    }
    const Agent *s = pick_objective(view);
    if (!s) return;
    const Vec2 off = me.position - s->position;
    const Vec2 spot = s->position + (dot(off, off) > 0.0 ? normalized(off) : Vec2{1.0, 0.0}) * 11.0;
    if (distance(me.position, spot) > 1.0 && !same_target(view, spot, 1.0)) api.move_to(spot);
    fire_direct(view, api, *s, WeaponSlot::Secondary);
}

// ---- gatherer / passive / crash ------------------------------------------------------

void GathererController::on_tick(const Perception &view, AgentApi &api) {
    const auto crystals = view.crystals();
    const Tick now = view.tick();
    avoid_until_.resize(crystals.size(), 0);
    if (current_ >= 0 && !crystals[current_].collected && view.nav_status() == NavStatus::Stuck) {
        avoid_until_[current_] = now + 90;
        current_ = -1;
    }
    if (current_ >= 0 && !crystals[current_].collected) {
        if (view.nav_status() == NavStatus::Idle || view.nav_status() == NavStatus::Arrived) {
            api.move_to(crystals[current_].position);
        }
        return;
    }
    const Vec2 here = view.self().position;
    int best = -1;
    int fallback = -1;
    for (int i = 0; i < static_cast<int>(crystals.size()); ++i) {
        if (crystals[i].collected) continue;
        const double d = distance(here, crystals[i].position);
        if (fallback < 0 || d < distance(here, crystals[fallback].position)) fallback = i;
        if (avoid_until_[i] > now) continue;
        if (best < 0 || d < distance(here, crystals[best].position)) best = i;
    }
    current_ = best >= 0 ? best : fallback;
    if (current_ >= 0) api.move_to(crystals[current_].position);
}

void CrashController::on_tick(const Perception &view, AgentApi &) {
    if (view.tick() >= 1) throw std::runtime_error("deliberate crash at tick " + std::to_string(view.tick()));
}

// ---- human -------------------------------------------------------------------------

PlayerCommand parse_player_command(std::string_view frame) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(frame);
    } catch (const json::parse_error &) {
        throw std::invalid_argument("frame is not valid JSON");
    }
    if (!j.is_object()) throw std::invalid_argument("frame must be a JSON object");
    if (j.value("type", std::string{}) != "cmd") throw std::invalid_argument("expected type \"cmd\"");
    if (!j.contains("cmd") || !j["cmd"].is_string()) throw std::invalid_argument("missing \"cmd\"");
    const std::string cmd = j["cmd"].get<std::string>();

    auto read_point = [&](PlayerCommand &c, bool required) {
        bool have = false;
        if (j.contains("x") || j.contains("y")) {
            if (!j.contains("x") || !j.contains("y") || !j["x"].is_number() || !j["y"].is_number()) {
                throw std::invalid_argument(cmd + ": x and y must be numbers");
            }
            c.point = {j["x"].get<double>(), j["y"].get<double>()};
            have = true;
        } else if (j.contains("target")) {
            const auto &t = j["target"];
            if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number()) {
                throw std::invalid_argument(cmd + ": target must be [x, y]");
            }
            c.point = {t[0].get<double>(), t[1].get<double>()};
            have = true;
        }
        if (have && !is_finite(c.point)) throw std::invalid_argument(cmd + ": coordinates must be finite");
        if (required && !have) throw std::invalid_argument(cmd + ": needs x and y");
        c.has_point = have;
    };

    PlayerCommand c;
    if (j.contains("tick")) {
        if (!j["tick"].is_number_integer()) throw std::invalid_argument("tick must be an integer");
        c.client_tick = j["tick"].get<Tick>();
    }
    if (cmd == "move_to") {
        c.kind = PlayerCommand::Kind::MoveTo;
        read_point(c, true);
    } else if (cmd == "shoot") {
        c.kind = PlayerCommand::Kind::Shoot;
        const int w = j.contains("weapon") && j["weapon"].is_number_integer() ? j["weapon"].get<int>() : 1;
        if (w != 1 && w != 2) throw std::invalid_argument("shoot: weapon must be 1 or 2");
        c.slot = w == 1 ? WeaponSlot::Primary : WeaponSlot::Secondary;
        read_point(c, false);
    } else if (cmd == "dodge") {
        c.kind = PlayerCommand::Kind::Dodge;
        const std::string side = j.value("side", std::string("left"));
        if (side != "left" && side != "right") throw std::invalid_argument("dodge: side must be left or right");
        c.side = side == "left" ? DodgeSide::Left : DodgeSide::Right;
    } else if (cmd == "stop") {
        c.kind = PlayerCommand::Kind::Stop;
    } else {
        throw std::invalid_argument("unknown cmd '" + cmd + "'");
    }
    return c;
}

void HumanInput::push(const PlayerCommand &c) {
    std::lock_guard lock(mutex_);
    queue_.push_back(c);
}

std::vector<PlayerCommand> HumanInput::drain() {
    std::lock_guard lock(mutex_);
    std::vector<PlayerCommand> out(queue_.begin(), queue_.end());
    queue_.clear();
    return out;
}

void HumanInput::set_connected(bool on) {
    std::lock_guard lock(mutex_);
    connected_ = on;
}

bool HumanInput::connected() const {
    std::lock_guard lock(mutex_);
    return connected_;
}

std::int64_t HumanInput::dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
}

void HumanInput::note_dropped(std::int64_t n) {
    std::lock_guard lock(mutex_);
    dropped_ += n;
}

void HumanController::on_tick(const Perception &, AgentApi &api) {
    const bool conn = input_->connected();
    if (was_connected_ && !conn) {
        api.stop();
        backlog_.clear();
    }
    was_connected_ = conn;
    for (auto &c : input_->drain()) backlog_.push_back(c);
    constexpr std::size_t kMaxBacklog = 64;
    if (backlog_.size() > kMaxBacklog) {
        input_->note_dropped(static_cast<std::int64_t>(backlog_.size() - kMaxBacklog));
        backlog_.erase(backlog_.begin(), backlog_.begin() + static_cast<std::ptrdiff_t>(backlog_.size() - kMaxBacklog));
    }
    std::array<bool, 4> used{};
    std::deque<PlayerCommand> later;
    for (const auto &c : backlog_) {
        auto &u = used[static_cast<std::size_t>(c.kind)];
        if (u) {
            later.push_back(c);
            continue;
        }
        u = true;
        switch (c.kind) {
        case PlayerCommand::Kind::MoveTo: api.move_to(c.point); break;
        case PlayerCommand::Kind::Stop: api.stop(); break;
        case PlayerCommand::Kind::Shoot:
            if (c.has_point) api.face(c.point);
            api.shoot(c.slot);
            break;
        case PlayerCommand::Kind::Dodge: api.dodge(c.side); break;
        }
    }
    backlog_ = std::move(later);
}

// ---- registry ------------------------------------------------------------------------

namespace {

const std::map<std::string, ControllerFactory> &registry() {
    static const std::map<std::string, ControllerFactory> r{
        {"minion-fsm", [] { return std::make_unique<MinionController>(); }},
        {"hero-bt", [] { return std::make_unique<HeroController>(); }},
        {"turret", [] { return std::make_unique<TurretHero>(); }},
        {"rusher", [] { return std::make_unique<RusherHero>(); }},
        {"kiter", [] { return std::make_unique<KiterHero>(); }},
        {"gatherer", [] { return std::make_unique<GathererController>(); }},
        {"tower", [] { return std::make_unique<TowerController>(); }},
        {"passive", [] { return std::make_unique<PassiveController>(); }},
        {"crash", [] { return std::make_unique<CrashController>(); }},
    };
    return r;
}

} // namespace

ControllerFactory controller_factory(const std::string &name) {
    auto it = registry().find(name);
    if (it == registry().end()) throw std::invalid_argument("unknown controller '" + name + "'");
    return it->second;
}

bool known_controller(const std::string &name) { return registry().count(name) != 0; }

std::vector<std::string> controller_names() {
    std::vector<std::string> out;
    for (const auto &[k, v] : registry()) out.push_back(k);
    return out;
}

} // namespace arena
