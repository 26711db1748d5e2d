#include "arena/btree.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <map>
#include <set>

using namespace arena;
namespace at = arena::testing;
using nlohmann::json;
using Ev = BtTraceEvent;
using K = BtTraceEvent::Kind;

namespace {

struct Counts {
    std::map<std::string, int> ran;
};

BtNode<Counts> cond(const std::string &name, bool value) {
    return bt_condition<Counts>(name, [value](const Counts &) { return value; });
}

BtNode<Counts> act(const std::string &name, std::vector<BtStatus> script) {
    return bt_action<Counts>(name, [name, script](Counts &c) {
        const int k = c.ran[name]++;
        return script[std::min<std::size_t>(static_cast<std::size_t>(k), script.size() - 1)];
    });
}

json leaf(const std::string &kind, const std::string &name, std::vector<std::string> script) {
    return {{"kind", kind}, {"name", name}, {"script", script}};
}

json composite(const std::string &kind, const std::string &name, std::vector<json> children) {
    return {{"kind", kind}, {"name", name}, {"children", children}};
}

} // namespace

TEST(BTree, ChoiceSelectsFirstApplicable) {
    Counts c;
    BehaviorTree<Counts> bt(bt_choice<Counts>("root", {cond("no", false), act("go", {BtStatus::Success})}));
    EXPECT_EQ(bt.tick(c), BtStatus::Success);
    EXPECT_EQ(c.ran["go"], 1);
}

TEST(BTree, SequenceStopsAtFirstFailure) {
    Counts c;
    BehaviorTree<Counts> bt(bt_sequence<Counts>(
        "root", {act("a", {BtStatus::Success}), act("b", {BtStatus::Success}), act("c", {BtStatus::Failure}),
                 act("d", {BtStatus::Success})}));
    EXPECT_EQ(bt.tick(c), BtStatus::Failure);
    EXPECT_EQ(c.ran["c"], 1);
    EXPECT_EQ(c.ran.count("d"), 0u);
}

TEST(BTree, RunningActionResumesWithoutRevisiting) {
    Counts c;
    int probes = 0;
    auto probe = bt_condition<Counts>("probe", [&probes](const Counts &) {
        ++probes;
        return true;
    });
    BehaviorTree<Counts> bt(bt_sequence<Counts>(
        "root", {probe, act("long", {BtStatus::Running, BtStatus::Running, BtStatus::Running, BtStatus::Success}),
                 act("after", {BtStatus::Success})}));
    for (int i = 0; i < 3; ++i) EXPECT_EQ(bt.tick(c), BtStatus::Running);
    EXPECT_EQ(c.ran.count("after"), 0u);
    EXPECT_EQ(bt.tick(c), BtStatus::Success);
    EXPECT_EQ(probes, 1);
    EXPECT_EQ(c.ran["long"], 4);
    EXPECT_EQ(c.ran["after"], 1);
}

TEST(BTree, ReactiveModePreemptsARunningChild) {
    Counts c;
    bool threat = false;
    int ceded = 0;
    auto guard = bt_condition<Counts>("threat", [&threat](const Counts &) { return threat; });
    auto slow = bt_action<Counts>(
        "slow", [](Counts &) { return BtStatus::Running; }, {}, [&ceded](Counts &) { ++ceded; });
    BehaviorTree<Counts> bt(bt_choice<Counts>("root", {guard, slow}), {true});
    EXPECT_EQ(bt.tick(c), BtStatus::Running);
    threat = true;
    EXPECT_EQ(bt.tick(c), BtStatus::Success);
    EXPECT_EQ(ceded, 1);
    EXPECT_FALSE(bt.active(2));
}

TEST(BTree, HooksFireOnTheActivePath) {
    Counts c;
    std::vector<std::string> log;
    auto a = bt_action<Counts>(
        "a", [](Counts &k) { return k.ran["a"]++ < 1 ? BtStatus::Running : BtStatus::Success; },
        [&log](Counts &) { log.push_back("take"); }, [&log](Counts &) { log.push_back("cede"); });
    BehaviorTree<Counts> bt(bt_sequence<Counts>("root", {a}));
    bt.tick(c);
    EXPECT_EQ(log, std::vector<std::string>{"take"});
    EXPECT_TRUE(bt.active(1));
    bt.tick(c);
    EXPECT_EQ(log, (std::vector<std::string>{"take", "cede"}));
}

TEST(BTree, SingleLeafTrace) {
    const auto trace = run_scripted(scripted_tree_from_json(leaf("action", "only", {"success"}).dump()), 1);
    ASSERT_EQ(trace.size(), 3u);
    EXPECT_EQ(trace[0], (Ev{0, 0, "only", K::TakeControl, BtStatus::Success}));
    EXPECT_EQ(trace[1], (Ev{0, 0, "only", K::Tick, BtStatus::Success}));
    EXPECT_EQ(trace[2], (Ev{0, 0, "only", K::CedeControl, BtStatus::Success}));
}

TEST(BTree, FigureShapedTreeTakesTheLeftmostPath) {
    // ? ( -> (c1, a1), -> (c2, a2), a3 ) with every condition true
    const json tree = composite(
        "choice", "root",
        {composite("sequence", "attack", {leaf("condition", "c1", {"success"}), leaf("action", "a1", {"success"})}),
         composite("sequence", "flee", {leaf("condition", "c2", {"success"}), leaf("action", "a2", {"success"})}),
         leaf("action", "a3", {"success"})});
    const auto trace = run_scripted(scripted_tree_from_json(tree.dump()), 1);
    std::vector<std::pair<std::string, K>> got;
    for (const auto &e : trace) got.emplace_back(e.name, e.kind);
    const std::vector<std::pair<std::string, K>> want{
        {"root", K::TakeControl}, {"attack", K::TakeControl}, {"c1", K::TakeControl}, {"c1", K::Tick},
        {"c1", K::CedeControl},   {"a1", K::TakeControl},     {"a1", K::Tick},        {"a1", K::CedeControl},
        {"attack", K::Tick},      {"attack", K::CedeControl}, {"root", K::Tick},      {"root", K::CedeControl}};
    EXPECT_EQ(got, want);
}

TEST(BTree, ScriptLastOutcomeRepeatsAndEmptyMeansSuccess) {
    const json tree = composite("sequence", "root", {leaf("action", "x", {"running", "failure"}), leaf("action", "y", {})});
    const auto trace = run_scripted(scripted_tree_from_json(tree.dump()), 3);
    std::vector<BtStatus> root;
    for (const auto &e : trace) {
        if (e.node == 0 && e.kind == K::Tick) root.push_back(e.status);
    }
    EXPECT_EQ(root, (std::vector<BtStatus>{BtStatus::Running, BtStatus::Failure, BtStatus::Failure}));
    const auto single = run_scripted(scripted_tree_from_json(leaf("action", "y", {}).dump()), 1);
    EXPECT_EQ(single[1].status, BtStatus::Success);
}

TEST(BTree, MatchesReferenceInterpreterOnRandomTrees) {
    for (bool reactive : {false, true}) {
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            const json tree = at::random_bt(seed);
            const int ticks = 12;
            const auto got = run_scripted(scripted_tree_from_json(tree.dump()), ticks, {reactive});
            const auto want = at::reference_bt_trace(tree, ticks, reactive);
            ASSERT_EQ(got.size(), want.size()) << "seed " << seed << " reactive " << reactive;
            for (std::size_t i = 0; i < got.size(); ++i) {
                ASSERT_EQ(got[i], want[i]) << "seed " << seed << " reactive " << reactive << " event " << i;
            }
        }
    }
}

TEST(BTree, TracePropertiesOnRandomTrees) {
    for (bool reactive : {false, true}) {
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            const json tree = at::random_bt(seed, 5, 4);
            const auto trace = at::run_and_reset(tree, 15, reactive);
            ASSERT_EQ(at::check_bt_properties(tree, trace, reactive), "") << "seed " << seed << " reactive " << reactive;
        }
    }
}

TEST(BTree, PropertyCheckerNoticesBacktracking) {
    // a hand-made trace where a left sibling is re-ticked while the right one runs
    const json tree = composite("sequence", "root", {leaf("condition", "c", {}), leaf("action", "a", {"running"})});
    std::vector<Ev> bad{{0, 0, "root", K::TakeControl, {}}, {0, 1, "c", K::TakeControl, {}},
                        {0, 1, "c", K::Tick, BtStatus::Success}, {0, 1, "c", K::CedeControl, {}},
                        {0, 2, "a", K::TakeControl, {}}, {0, 2, "a", K::Tick, BtStatus::Running},
                        {0, 0, "root", K::Tick, BtStatus::Running}, {1, 1, "c", K::TakeControl, {}},
                        {1, 1, "c", K::Tick, BtStatus::Success}, {1, 1, "c", K::CedeControl, {}},
                        {1, 2, "a", K::CedeControl, {}}, {1, 0, "root", K::CedeControl, {}}};
    EXPECT_NE(at::check_bt_properties(tree, bad, false), "");
}

TEST(BTree, ValidationErrors) {
    auto rule_of = [](const json &j) {
        try {
            scripted_tree_from_json(j.dump());
        } catch (const ValidationError &e) {
            return e.rule();
        }
        return std::string("none");
    };
    json bad_leaf = leaf("action", "x", {});
    bad_leaf["children"] = json::array({leaf("action", "y", {})});
    EXPECT_EQ(rule_of(bad_leaf), "bt.leaf_children");
    EXPECT_EQ(rule_of(composite("choice", "c", {})), "bt.empty_composite");
    EXPECT_EQ(rule_of(leaf("condition", "c", {"running"})), "bt.condition_running");
    EXPECT_EQ(rule_of(json{{"kind", "parallel"}}), "bt.kind");
    EXPECT_EQ(rule_of(leaf("action", "x", {"maybe"})), "bt.script");
    EXPECT_THROW((BehaviorTree<Counts>(bt_sequence<Counts>("empty", {}))), ValidationError);
    BtNode<Counts> nofn;
    nofn.kind = BtKind::Action;
    EXPECT_THROW((BehaviorTree<Counts>(nofn)), ValidationError);
}

TEST(BTree, UnnamedNodesAreNamedByPath) {
    json tree = composite("choice", "", {leaf("action", "", {})});
    tree.erase("name");
    tree["children"][0].erase("name");
    ScriptedTree st = scripted_tree_from_json(tree.dump());
    BehaviorTree<ScriptedLeaves> bt(std::move(st.root));
    EXPECT_EQ(bt.name(0), "root");
    EXPECT_EQ(bt.name(1), "root/0");
}

TEST(BTree, JsonAndTraceRoundTrip) {
    const json tree = at::random_bt(42);
    ScriptedTree st = scripted_tree_from_json(tree.dump());
    const std::string again = scripted_tree_to_json(st.root, st.leaves);
    EXPECT_EQ(run_scripted(scripted_tree_from_json(again), 10), run_scripted(scripted_tree_from_json(tree.dump()), 10));
    const auto trace = run_scripted(std::move(st), 10);
    EXPECT_EQ(trace_from_jsonl(trace_to_jsonl(trace)), trace);
    EXPECT_THROW(trace_from_jsonl("{\"tick\":0}\nnot json\n"), ValidationError);
}
