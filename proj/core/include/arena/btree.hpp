#pragma once

#include "arena/map.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arena {

enum class BtStatus : std::uint8_t { Success, Failure, Running };
enum class BtKind : std::uint8_t { Choice, Sequence, Condition, Action };

std::string_view to_string(BtStatus s);
std::string_view to_string(BtKind k);
std::optional<BtStatus> bt_status_from_string(std::string_view s);
std::optional<BtKind> bt_kind_from_string(std::string_view s);

struct BtTraceEvent {
    enum class Kind : std::uint8_t { TakeControl, Tick, CedeControl };
    std::int64_t tick = 0; ///< tree tick counter, starting at 0
    int node = 0;          ///< preorder index
    std::string name;
    Kind kind = Kind::Tick;
    BtStatus status = BtStatus::Success; ///< meaningful for Tick only
    friend bool operator==(const BtTraceEvent &, const BtTraceEvent &) = default;
};

std::string_view to_string(BtTraceEvent::Kind k);

struct BtOptions {
    /// Re-evaluate composites from their first child every tick, aborting a
    /// running child when an earlier sibling becomes applicable.
    bool reactive = false;
};

/// Tree description. Conditions see the context read-only.
template <class Ctx>
struct BtNode {
    BtKind kind = BtKind::Action;
    std::string name;
    std::vector<BtNode> children;
    std::function<bool(const Ctx &)> condition;
    std::function<BtStatus(Ctx &)> action;
    std::function<void(Ctx &)> on_take_control;
    std::function<void(Ctx &)> on_cede_control;
};

template <class Ctx>
BtNode<Ctx> bt_choice(std::string name, std::vector<BtNode<Ctx>> children) {
    BtNode<Ctx> n;
    n.kind = BtKind::Choice;
    n.name = std::move(name);
    n.children = std::move(children);
    return n;
}

template <class Ctx>
BtNode<Ctx> bt_sequence(std::string name, std::vector<BtNode<Ctx>> children) {
    BtNode<Ctx> n;
    n.kind = BtKind::Sequence;
    n.name = std::move(name);
    n.children = std::move(children);
    return n;
}

template <class Ctx>
BtNode<Ctx> bt_condition(std::string name, std::function<bool(const Ctx &)> fn) {
    BtNode<Ctx> n;
    n.kind = BtKind::Condition;
    n.name = std::move(name);
    n.condition = std::move(fn);
    return n;
}

template <class Ctx>
BtNode<Ctx> bt_action(std::string name, std::function<BtStatus(Ctx &)> fn,
                      std::function<void(Ctx &)> on_take = {}, std::function<void(Ctx &)> on_cede = {}) {
    BtNode<Ctx> n;
    n.kind = BtKind::Action;
    n.name = std::move(name);
    n.action = std::move(fn);
    n.on_take_control = std::move(on_take);
    n.on_cede_control = std::move(on_cede);
    return n;
}

/// Memoryful behaviour tree: a composite whose child is running resumes that
/// child on the next tick without revisiting earlier siblings.
template <class Ctx>
class BehaviorTree {
public:
    using TraceSink = std::function<void(const BtTraceEvent &)>;

    explicit BehaviorTree(BtNode<Ctx> root, BtOptions options = {}) : options_(options) {
        flatten(std::move(root), "root");
    }

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }
    const BtOptions &options() const { return options_; }
    std::size_t size() const { return nodes_.size(); }
    const std::string &name(int node) const { return nodes_[node].name; }
    BtKind kind(int node) const { return nodes_[node].kind; }
    bool active(int node) const { return nodes_[node].active; }
    std::int64_t ticks() const { return tick_; }

    BtStatus tick(Ctx &ctx) {
        const BtStatus s = run(0, ctx);
        ++tick_;
        return s;
    }

    /// Cedes every node on the active path, deepest first.
    void reset(Ctx &ctx) {
        abort(0, ctx);
    }

private:
    struct Flat {
        BtKind kind;
        std::string name;
        std::vector<int> children;
        std::function<bool(const Ctx &)> condition;
        std::function<BtStatus(Ctx &)> action;
        std::function<void(Ctx &)> on_take, on_cede;
        bool active = false;
        int resume = -1; ///< index into children of the running child
    };

    int flatten(BtNode<Ctx> &&n, const std::string &path) {
        const std::string where = n.name.empty() ? path : n.name;
        const bool leaf = n.kind == BtKind::Condition || n.kind == BtKind::Action;
        if (leaf && !n.children.empty()) throw ValidationError("bt.leaf_children", "leaf '" + where + "' has children");
        if (!leaf && n.children.empty()) throw ValidationError("bt.empty_composite", "composite '" + where + "' has no children");
        if (n.kind == BtKind::Condition && !n.condition) throw ValidationError("bt.missing_fn", "condition '" + where + "' has no predicate");
        if (n.kind == BtKind::Action && !n.action) throw ValidationError("bt.missing_fn", "action '" + where + "' has no body");
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(Flat{n.kind, n.name, {}, std::move(n.condition), std::move(n.action),
                              std::move(n.on_take_control), std::move(n.on_cede_control)});
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            const int c = flatten(std::move(n.children[i]), where + "/" + std::to_string(i));
            nodes_[id].children.push_back(c);
        }
        return id;
    }

    void emit(int node, BtTraceEvent::Kind kind, BtStatus status = BtStatus::Success) {
        if (trace_) trace_(BtTraceEvent{tick_, node, nodes_[node].name, kind, status});
    }

    void take(int id, Ctx &ctx) {
        Flat &n = nodes_[id];
        n.active = true;
        emit(id, BtTraceEvent::Kind::TakeControl);
        if (n.on_take) n.on_take(ctx);
    }

    void cede(int id, Ctx &ctx) {
        Flat &n = nodes_[id];
        n.active = false;
        n.resume = -1;
        emit(id, BtTraceEvent::Kind::CedeControl);
        if (n.on_cede) n.on_cede(ctx);
    }

    void abort(int id, Ctx &ctx) {
        Flat &n = nodes_[id];
        if (!n.active) return;
        if (n.resume >= 0) abort(n.children[n.resume], ctx);
        cede(id, ctx);
    }

    BtStatus run(int id, Ctx &ctx) {
        if (!nodes_[id].active) take(id, ctx);
        BtStatus s = BtStatus::Failure;
        switch (nodes_[id].kind) {
        case BtKind::Condition:
            s = nodes_[id].condition(ctx) ? BtStatus::Success : BtStatus::Failure;
            break;
        case BtKind::Action:
            s = nodes_[id].action(ctx);
            break;
        case BtKind::Choice:
        case BtKind::Sequence: {
            const bool choice = nodes_[id].kind == BtKind::Choice;
            const BtStatus keep_going = choice ? BtStatus::Failure : BtStatus::Success;
            const int running = nodes_[id].resume;
            const int count = static_cast<int>(nodes_[id].children.size());
            int i = (running >= 0 && !options_.reactive) ? running : 0;
            s = keep_going;
            nodes_[id].resume = -1;
            for (; i < count; ++i) {
                s = run(nodes_[id].children[i], ctx);
                // reactive mode: an earlier sibling preempts the running one
                if (options_.reactive && running >= 0 && i < running && s != keep_going) {
                    abort(nodes_[id].children[running], ctx);
                }
                if (s == BtStatus::Running) nodes_[id].resume = i;
                if (s != keep_going) break;
            }
            break;
        }
        }
        emit(id, BtTraceEvent::Kind::Tick, s);
        if (s != BtStatus::Running) cede(id, ctx);
        return s;
    }

    BtOptions options_;
    std::vector<Flat> nodes_;
    TraceSink trace_;
    std::int64_t tick_ = 0;
};

// ---- engine-free scripted trees -------------------------------------------

/// Scripted leaf outcomes: the k-th tick of a leaf returns script[k], and the
/// last entry repeats once the script is exhausted.
struct ScriptedLeaves {
    std::vector<std::vector<BtStatus>> scripts; ///< by preorder node index
    mutable std::vector<std::size_t> cursor;
};

struct ScriptedTree {
    BtNode<ScriptedLeaves> root;
    ScriptedLeaves leaves;
};

/// {"kind":"choice|sequence|condition|action","name":..., "children":[...], "script":["success",...]}
ScriptedTree scripted_tree_from_json(std::string_view json_text);
std::string scripted_tree_to_json(const BtNode<ScriptedLeaves> &root, const ScriptedLeaves &leaves);

/// Runs the tree for `ticks` ticks, returning the full trace.
std::vector<BtTraceEvent> run_scripted(ScriptedTree tree, int ticks, BtOptions options = {});

std::string trace_to_jsonl(const std::vector<BtTraceEvent> &trace);
std::vector<BtTraceEvent> trace_from_jsonl(std::string_view text);

} // namespace arena
