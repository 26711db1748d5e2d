#include "arena/harness.hpp"
#include "arena/replay.hpp"
#include "common.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <sstream>

using namespace arena;
namespace at = arena::testing;

namespace {

std::vector<std::string> split_lines(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string join_lines(const std::vector<std::string> &lines) {
    std::string out;
    for (const auto &l : lines) out += l + "\n";
    return out;
}

Replay reference_replay(std::uint64_t seed = 4) {
    const MapFile m = at::shipped_map("arena");
    const ControllerBundle b = load_bundle(at::data_path("bundles/reference.json"));
    return make_replay(m, seed, b.name, "do-nothing", run_headless(m, b, empty_bundle(), seed, 2000));
}

} // namespace

TEST(Replay, EmptyMatchHasOnlyTheEnd) {
    const MapFile m = at::open_field();
    const MatchResult r = run_headless(m, empty_bundle(), empty_bundle(), 1, 10);
    const Replay rp = make_replay(m, 1, "do-nothing", "do-nothing", r);
    const std::string text = replay_to_jsonl(rp);
    const auto lines = split_lines(text);
    ASSERT_EQ(lines.size(), 2u);
    const auto header = nlohmann::json::parse(lines[0]);
    EXPECT_EQ(header["type"], "header");
    EXPECT_EQ(header["engine_version"], std::string(kEngineVersion));
    EXPECT_EQ(header["outcome"], "draw");
    EXPECT_EQ(header["events"], 1);
    EXPECT_EQ(nlohmann::json::parse(lines[1])["kind"], "match_end");
    EXPECT_EQ(replay_from_jsonl(text), rp);
}

TEST(Replay, RoundTripIsExact) {
    const Replay rp = reference_replay();
    ASSERT_GT(rp.result.events.size(), 10u);
    const std::string text = replay_to_jsonl(rp);
    const Replay back = replay_from_jsonl(text, rp.map_hash);
    EXPECT_EQ(back, rp);
    EXPECT_EQ(replay_to_jsonl(back), text);
    EXPECT_EQ(rp.map_hash, map_hash(at::shipped_map("arena")));
}

TEST(Replay, FileRoundTrip) {
    const Replay rp = reference_replay(5);
    const auto path = std::filesystem::temp_directory_path() / "arena_test_replay.jsonl";
    write_replay(path, rp);
    EXPECT_EQ(load_replay(path), rp);
    std::filesystem::remove(path);
}

TEST(Replay, TamperedLineIsNamed) {
    const auto lines = split_lines(replay_to_jsonl(reference_replay()));
    ASSERT_GT(lines.size(), 6u);
    auto check = [&](std::size_t index, const std::string &replacement) {
        auto bad = lines;
        bad[index] = replacement;
        try {
            replay_from_jsonl(join_lines(bad));
            ADD_FAILURE() << "accepted tampered line " << index + 1;
        } catch (const ReplayIncompatible &) {
            ADD_FAILURE() << "tampering is not an incompatibility";
        } catch (const ReplayError &e) {
            EXPECT_EQ(e.line(), static_cast<int>(index + 1));
            EXPECT_NE(std::string(e.what()).find("line " + std::to_string(index + 1)), std::string::npos);
        }
    };
    check(3, lines[3].substr(0, lines[3].size() / 2));
    check(4, R"({"type":"event","tick":0,"kind":"teleport","agent":0,"other":-1,"amount":0,"team":"A","agent_kind":"minion","x":0,"y":0})");
    check(5, R"({"type":"bogus"})");
    check(0, R"({"type":"event"})");
    // a tick running backwards
    auto j = nlohmann::json::parse(lines[lines.size() - 2]);
    j["tick"] = -5;
    check(lines.size() - 2, j.dump());
}

TEST(Replay, StructuralProblems) {
    auto lines = split_lines(replay_to_jsonl(reference_replay()));
    EXPECT_THROW(replay_from_jsonl(""), ReplayError);
    auto missing_end = lines;
    missing_end.pop_back();
    EXPECT_THROW(replay_from_jsonl(join_lines(missing_end)), ReplayError);
    auto extra = lines;
    extra.push_back(lines[1]);
    EXPECT_THROW(replay_from_jsonl(join_lines(extra)), ReplayError);
}

TEST(Replay, VersionAndMapMismatchAreIncompatible) {
    const Replay rp = reference_replay();
    auto lines = split_lines(replay_to_jsonl(rp));
    auto header = nlohmann::json::parse(lines[0]);
    header["engine_version"] = "9.9.9";
    auto other = lines;
    other[0] = header.dump();
    try {
        replay_from_jsonl(join_lines(other));
        FAIL();
    } catch (const ReplayIncompatible &e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_NE(std::string(e.what()).find("9.9.9"), std::string::npos);
    }
    const std::string text = join_lines(lines);
    EXPECT_THROW(replay_from_jsonl(text, rp.map_hash ^ 1), ReplayIncompatible);
    EXPECT_THROW(replay_from_jsonl(text, map_hash(at::shipped_map("gates"))), ReplayIncompatible);
    EXPECT_NO_THROW(replay_from_jsonl(text, rp.map_hash));
}

TEST(Replay, MapHashTracksContent) {
    MapFile a = at::shipped_map("arena");
    MapFile b = a;
    EXPECT_EQ(map_hash(a), map_hash(b));
    b.obstacles.pop_back();
    EXPECT_NE(map_hash(a), map_hash(b));
    a = at::shipped_map("gates");
    b = a;
    b.gates.front().period_ticks += 1;
    EXPECT_NE(map_hash(a), map_hash(b));
}
