#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arena {

/// Returned by a state's on_tick: stay, or move to another state.
struct Transition {
    std::optional<std::string> target;

    static Transition stay() { return {}; }
    static Transition to(std::string state) { return {std::move(state)}; }
    bool stays() const { return !target.has_value(); }
};

class UndefinedStateError : public std::runtime_error {
public:
    explicit UndefinedStateError(const std::string &state)
        : std::runtime_error("transition to undefined state '" + state + "'"), state_(state) {}
    const std::string &state() const { return state_; }

private:
    std::string state_;
};

enum class FsmHook { Enter, Tick, Exit };

inline std::string_view to_string(FsmHook h) {
    switch (h) {
    case FsmHook::Enter: return "enter";
    case FsmHook::Tick: return "tick";
    case FsmHook::Exit: return "exit";
    }
    return "?";
}

/// Flat state machine. One transition per tick at most: the successor's
/// on_tick does not run until the next call to tick().
template <class Ctx>
class StateMachine {
public:
    struct State {
        std::string id;
        std::function<void(Ctx &)> on_enter;
        std::function<void(Ctx &)> on_exit;
        std::function<Transition(Ctx &)> on_tick;
    };
    using TraceSink = std::function<void(const std::string &state, FsmHook hook)>;

    StateMachine(std::vector<State> states, std::string initial) : initial_(std::move(initial)) {
        for (auto &s : states) {
            if (!s.on_tick) throw std::invalid_argument("state '" + s.id + "' has no on_tick");
            const std::string id = s.id;
            if (!states_.emplace(id, std::move(s)).second) throw std::invalid_argument("duplicate state '" + id + "'");
        }
        if (!states_.count(initial_)) throw UndefinedStateError(initial_);
    }

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }

    /// Enters the initial state, leaving any active one first.
    void start(Ctx &ctx) {
        if (active_) exit_active(ctx);
        enter(ctx, initial_);
    }

    void tick(Ctx &ctx) {
        if (!active_) enter(ctx, initial_);
        State &s = states_.at(*active_);
        note(s.id, FsmHook::Tick);
        Transition t = s.on_tick(ctx);
        if (t.stays()) return;
        if (!states_.count(*t.target)) throw UndefinedStateError(*t.target);
        exit_active(ctx);
        enter(ctx, *t.target);
    }

    bool started() const { return active_.has_value(); }
    const std::string &active() const {
        static const std::string none;
        return active_ ? *active_ : none;
    }
    bool has_state(const std::string &id) const { return states_.count(id) != 0; }

private:
    void note(const std::string &id, FsmHook h) {
        if (trace_) trace_(id, h);
    }
    void enter(Ctx &ctx, const std::string &id) {
        State &s = states_.at(id);
        active_ = id;
        note(id, FsmHook::Enter);
        if (s.on_enter) s.on_enter(ctx);
    }
    void exit_active(Ctx &ctx) {
        State &s = states_.at(*active_);
        note(s.id, FsmHook::Exit);
        if (s.on_exit) s.on_exit(ctx);
        active_.reset();
    }

    std::map<std::string, State> states_;
    std::string initial_;
    std::optional<std::string> active_;
    TraceSink trace_;
};

} // namespace arena
