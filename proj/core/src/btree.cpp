#include "arena/btree.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace arena {

using nlohmann::json;

std::string_view to_string(BtStatus s) {
    switch (s) {
    case BtStatus::Success: return "success";
    case BtStatus::Failure: return "failure";
    case BtStatus::Running: return "running";
    }
    return "?";
}

std::string_view to_string(BtKind k) {
    switch (k) {
    case BtKind::Choice: return "choice";
    case BtKind::Sequence: return "sequence";
    case BtKind::Condition: return "condition";
    case BtKind::Action: return "action";
    }
    return "?";
}

std::string_view to_string(BtTraceEvent::Kind k) {
    switch (k) {
    case BtTraceEvent::Kind::TakeControl: return "take_control";
    case BtTraceEvent::Kind::Tick: return "tick";
    case BtTraceEvent::Kind::CedeControl: return "cede_control";
    }
    return "?";
}

std::optional<BtStatus> bt_status_from_string(std::string_view s) {
    for (auto v : {BtStatus::Success, BtStatus::Failure, BtStatus::Running}) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

std::optional<BtKind> bt_kind_from_string(std::string_view s) {
    for (auto v : {BtKind::Choice, BtKind::Sequence, BtKind::Condition, BtKind::Action}) {
        if (to_string(v) == s) return v;
    }
    // common aliases
    if (s == "selector" || s == "fallback") return BtKind::Choice;
    return std::nullopt;
}

namespace {

BtStatus next_outcome(const ScriptedLeaves &leaves, int id) {
    const auto &script = leaves.scripts[id];
    std::size_t &k = leaves.cursor[id];
    const BtStatus s = script[std::min(k, script.size() - 1)];
    ++k;
    return s;
}

BtNode<ScriptedLeaves> parse_node(const json &j, ScriptedLeaves &leaves, const std::string &path) {
    if (!j.is_object()) throw ValidationError("bt.schema", path + ": node must be an object");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ValidationError("bt.schema", path + ": missing kind");
    const std::string kind_name = j["kind"].get<std::string>();
    const auto kind = bt_kind_from_string(kind_name);
    if (!kind) throw ValidationError("bt.kind", path + ": unknown kind '" + kind_name + "'");

    const int id = static_cast<int>(leaves.scripts.size());
    leaves.scripts.emplace_back();
    leaves.cursor.push_back(0);

    BtNode<ScriptedLeaves> n;
    n.kind = *kind;
    n.name = j.value("name", path);
    const bool leaf = *kind == BtKind::Condition || *kind == BtKind::Action;
    const bool has_children = j.contains("children") && !j["children"].empty();
    if (leaf && has_children) throw ValidationError("bt.leaf_children", "leaf '" + n.name + "' has children");
    if (!leaf && !has_children) throw ValidationError("bt.empty_composite", "composite '" + n.name + "' has no children");

    if (leaf) {
        std::vector<BtStatus> script;
        if (j.contains("script")) {
            if (!j["script"].is_array()) throw ValidationError("bt.schema", n.name + ": script must be an array");
            for (const auto &e : j["script"]) {
                const auto s = e.is_string() ? bt_status_from_string(e.get<std::string>()) : std::nullopt;
                if (!s) throw ValidationError("bt.script", n.name + ": bad outcome " + e.dump());
                script.push_back(*s);
            }
        }
        if (script.empty()) script.push_back(BtStatus::Success);
        if (*kind == BtKind::Condition) {
            for (auto s : script) {
                if (s == BtStatus::Running) throw ValidationError("bt.condition_running", "condition '" + n.name + "' cannot return running");
            }
            n.condition = [id](const ScriptedLeaves &l) { return next_outcome(l, id) == BtStatus::Success; };
        } else {
            n.action = [id](ScriptedLeaves &l) { return next_outcome(l, id); };
        }
        leaves.scripts[id] = std::move(script);
        return n;
    }
    if (!j["children"].is_array()) throw ValidationError("bt.schema", n.name + ": children must be an array");
    std::size_t i = 0;
    for (const auto &c : j["children"]) n.children.push_back(parse_node(c, leaves, n.name + "/" + std::to_string(i++)));
    return n;
}

json dump_node(const BtNode<ScriptedLeaves> &n, const ScriptedLeaves &leaves, int &next) {
    const int id = next++;
    json j{{"kind", to_string(n.kind)}, {"name", n.name}};
    if (n.kind == BtKind::Condition || n.kind == BtKind::Action) {
        json script = json::array();
        if (id < static_cast<int>(leaves.scripts.size())) {
            for (auto s : leaves.scripts[id]) script.push_back(to_string(s));
        }
        j["script"] = script;
    } else {
        j["children"] = json::array();
        for (const auto &c : n.children) j["children"].push_back(dump_node(c, leaves, next));
    }
    return j;
}

} // namespace

ScriptedTree scripted_tree_from_json(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ValidationError("schema.json", e.what());
    }
    ScriptedTree t;
    t.root = parse_node(j.contains("root") ? j["root"] : j, t.leaves, "root");
    return t;
}

std::string scripted_tree_to_json(const BtNode<ScriptedLeaves> &root, const ScriptedLeaves &leaves) {
    int next = 0;
    return dump_node(root, leaves, next).dump(2);
}

std::vector<BtTraceEvent> run_scripted(ScriptedTree tree, int ticks, BtOptions options) {
    ScriptedLeaves leaves = tree.leaves;
    std::fill(leaves.cursor.begin(), leaves.cursor.end(), 0);
    BehaviorTree<ScriptedLeaves> bt(std::move(tree.root), options);
    std::vector<BtTraceEvent> trace;
    bt.set_trace([&](const BtTraceEvent &e) { trace.push_back(e); });
    for (int t = 0; t < ticks; ++t) bt.tick(leaves);
    return trace;
}

std::string trace_to_jsonl(const std::vector<BtTraceEvent> &trace) {
    std::string out;
    for (const auto &e : trace) {
        json j{{"tick", e.tick}, {"node", e.node}, {"name", e.name}, {"event", to_string(e.kind)}};
        if (e.kind == BtTraceEvent::Kind::Tick) j["status"] = to_string(e.status);
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<BtTraceEvent> trace_from_jsonl(std::string_view text) {
    std::vector<BtTraceEvent> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            BtTraceEvent e;
            e.tick = j.at("tick").get<std::int64_t>();
            e.node = j.at("node").get<int>();
            e.name = j.value("name", std::string{});
            const std::string ev = j.at("event").get<std::string>();
            if (ev == "take_control") {
                e.kind = BtTraceEvent::Kind::TakeControl;
            } else if (ev == "tick") {
                e.kind = BtTraceEvent::Kind::Tick;
                const auto s = bt_status_from_string(j.at("status").get<std::string>());
                if (!s) throw std::invalid_argument("bad status");
                e.status = *s;
            } else if (ev == "cede_control") {
                e.kind = BtTraceEvent::Kind::CedeControl;
            } else {
                throw std::invalid_argument("bad event '" + ev + "'");
            }
            out.push_back(std::move(e));
        } catch (const std::exception &ex) {
            throw ValidationError("trace.line", "line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return out;
}

} // namespace arena
