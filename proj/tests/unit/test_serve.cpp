#include "arena/harness.hpp"
#include "arena/serve.hpp"
#include "common.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <thread>

using namespace arena;
namespace at = arena::testing;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

class Server {
public:
    explicit Server(double max_seconds = 20.0) {
        ServeOptions o;
        o.map = at::shipped_map("duel");
        o.opponent = empty_bundle();
        o.support = empty_bundle("support");
        o.port = 0;
        o.max_seconds = max_seconds;
        o.max_ticks = 100000;
        server_ = std::make_unique<SessionServer>(o);
        port = server_->listen();
        thread_ = std::thread([this] { server_->run(); });
    }
    ~Server() {
        server_->stop();
        thread_.join();
    }
    SessionServer &operator*() { return *server_; }
    SessionServer *operator->() { return server_.get(); }

    /// Server tick at which the frame was accepted, from the session log.
    std::optional<Tick> accepted_at(const std::string &frame) const {
        for (const auto &line : server_->session_log()) {
            const auto sp = line.find(' ');
            if (line.compare(sp + 1, 7, "accept ") == 0 && line.substr(sp + 8) == frame) return std::stoll(line.substr(0, sp));
        }
        return std::nullopt;
    }

    unsigned short port = 0;

private:
    std::unique_ptr<SessionServer> server_;
    std::thread thread_;
};

class Client {
public:
    explicit Client(unsigned short port) : ws_(ioc_) {
        tcp::resolver resolver(ioc_);
        asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1", "/ws");
    }
    json read() {
        beast::flat_buffer buf;
        ws_.read(buf);
        return json::parse(beast::buffers_to_string(buf.data()));
    }
    /// Next frame of the given type, skipping others.
    json read_type(const std::string &type) {
        for (;;) {
            json j = read();
            if (j["type"] == type) return j;
        }
    }
    void send(const std::string &text) { ws_.write(asio::buffer(text)); }
    void close() { ws_.close(websocket::close_code::normal); }

private:
    asio::io_context ioc_;
    websocket::stream<tcp::socket> ws_;
};

std::pair<int, std::string> http_get(unsigned short port, const std::string &target) {
    asio::io_context ioc;
    beast::tcp_stream stream(ioc);
    tcp::resolver resolver(ioc);
    stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    beast::error_code ec;
    stream.socket().shutdown(tcp::socket::shutdown_both, ec);
    return {static_cast<int>(res.result_int()), res.body()};
}

const json *entity(const json &state, AgentId id) {
    for (const auto &e : state["entities"]) {
        if (e["id"] == id) return &e;
    }
    return nullptr;
}

} // namespace

TEST(Serve, HandshakeAndFrameRate) {
    Server srv;
    Client c(srv.port);
    const json hello = c.read();
    EXPECT_EQ(hello["type"], "hello");
    EXPECT_EQ(hello["hero"], srv->human_hero());
    EXPECT_EQ(hello["control"], true);
    EXPECT_EQ(c.read()["type"], "map");
    EXPECT_EQ(c.read()["type"], "state");

    const auto start = std::chrono::steady_clock::now();
    int frames = 0;
    Tick last = -1;
    while (std::chrono::steady_clock::now() - start < std::chrono::seconds(2)) {
        const json s = c.read_type("state");
        EXPECT_GT(s["tick"].get<Tick>(), last);
        last = s["tick"].get<Tick>();
        ++frames;
    }
    EXPECT_GE(frames, 28) << "frames in 2 s"; // 15 per second, one frame of slack at each end
}

TEST(Serve, MoveTargetShowsWithinTwoTicks) {
    Server srv;
    Client c(srv.port);
    c.read_type("state");
    const std::string cmd = R"({"type":"cmd","cmd":"move_to","x":40,"y":30})";
    c.send(cmd);
    for (int i = 0; i < 60; ++i) {
        const json s = c.read_type("state");
        const json *h = entity(s, srv->human_hero());
        ASSERT_NE(h, nullptr);
        if (h->contains("target") && (*h)["target"] == json::array({40.0, 30.0})) {
            const auto t = srv.accepted_at(cmd);
            ASSERT_TRUE(t);
            EXPECT_LE(s["tick"].get<Tick>(), *t + 2);
            return;
        }
    }
    FAIL() << "target never appeared";
}

TEST(Serve, MalformedFramesGetErrorsAndTheSessionContinues) {
    Server srv;
    Client c(srv.port);
    c.read_type("state");
    c.send("{oops");
    json err = c.read_type("error");
    EXPECT_NE(err["message"].get<std::string>().find("JSON"), std::string::npos);
    c.send(R"({"type":"cmd","cmd":"warp"})");
    err = c.read_type("error");
    EXPECT_NE(err["message"].get<std::string>().find("warp"), std::string::npos);
    c.send(R"({"type":"cmd","cmd":"move_to","x":"far","y":1})");
    c.read_type("error");

    c.send(R"({"type":"ping"})");
    EXPECT_EQ(c.read_type("pong")["type"], "pong");
    c.send(R"({"type":"cmd","cmd":"move_to","x":25,"y":28})");
    for (int i = 0; i < 30; ++i) {
        const json st = c.read_type("state");
        const json *h = entity(st, srv->human_hero());
        if (h && h->contains("target")) {
            EXPECT_EQ((*h)["nav"], "moving");
            return;
        }
    }
    FAIL() << "valid command after errors was not applied";
}

TEST(Serve, DisconnectIdlesAndReconnectResumes) {
    Server srv;
    {
        Client c(srv.port);
        c.read_type("state");
        c.send(R"({"type":"cmd","cmd":"move_to","x":60,"y":20})");
        for (int i = 0; i < 10; ++i) c.read_type("state");
        c.close();
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    const json s1 = json::parse(http_get(srv.port, "/state").second);
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    const json s2 = json::parse(http_get(srv.port, "/state").second);
    ASSERT_GT(s2["tick"].get<Tick>(), s1["tick"].get<Tick>());
    const json *h1 = entity(s1, srv->human_hero());
    const json *h2 = entity(s2, srv->human_hero());
    ASSERT_TRUE(h1 && h2);
    EXPECT_EQ((*h2)["nav"], "idle");
    EXPECT_EQ((*h1)["x"], (*h2)["x"]);
    EXPECT_LT((*h2)["x"].get<double>(), 60.0);

    Client again(srv.port);
    EXPECT_EQ(again.read()["control"], true);
    again.send(R"({"type":"cmd","cmd":"move_to","x":60,"y":20})");
    for (int i = 0; i < 20; ++i) again.read_type("state");
    const json *h3 = nullptr;
    json s3;
    s3 = again.read_type("state");
    h3 = entity(s3, srv->human_hero());
    ASSERT_TRUE(h3);
    EXPECT_GT((*h3)["x"].get<double>(), (*h2)["x"].get<double>());

    bool disconnect = false, connect2 = false;
    int connects = 0;
    for (const auto &l : srv->session_log()) {
        disconnect = disconnect || l.find(" disconnect") != std::string::npos;
        connects += l.find(" connect") != std::string::npos && l.find("disconnect") == std::string::npos;
    }
    connect2 = connects == 2;
    EXPECT_TRUE(disconnect);
    EXPECT_TRUE(connect2);
}

TEST(Serve, NewestConnectionHoldsControl) {
    Server srv;
    Client first(srv.port);
    first.read_type("state");
    Client second(srv.port);
    second.read_type("state");
    EXPECT_EQ(first.read_type("control")["control"], false);
    first.send(R"({"type":"cmd","cmd":"stop"})");
    EXPECT_NE(first.read_type("error")["message"].get<std::string>().find("does not control"), std::string::npos);
    second.close();
    EXPECT_EQ(first.read_type("control")["control"], true);
}

TEST(Serve, HttpEndpoints) {
    Server srv;
    auto [code, body] = http_get(srv.port, "/health");
    EXPECT_EQ(code, 200);
    const json h = json::parse(body);
    EXPECT_EQ(h["ok"], true);
    EXPECT_EQ(h["ended"], false);
    std::tie(code, body) = http_get(srv.port, "/state");
    EXPECT_EQ(code, 200);
    EXPECT_EQ(json::parse(body)["type"], "state");
    std::tie(code, body) = http_get(srv.port, "/map");
    EXPECT_EQ(json::parse(body)["name"], "duel");
    EXPECT_EQ(http_get(srv.port, "/../../etc/passwd").first, 404);
    EXPECT_EQ(http_get(srv.port, "/replays/../x").first, 404);
}

TEST(Serve, EndsWithAnEndFrame) {
    ServeOptions o;
    o.map = at::shipped_map("duel");
    o.opponent = empty_bundle();
    o.support = empty_bundle("support");
    o.port = 0;
    o.max_ticks = 20;
    o.linger_seconds = 1.0;
    SessionServer server(o);
    const unsigned short port = server.listen();
    std::thread t([&] { server.run(); });
    {
        Client c(port);
        const json end = c.read_type("end");
        EXPECT_EQ(end["reason"], "tick_limit");
        EXPECT_EQ(end["tick"], 20);
        c.send(R"({"type":"cmd","cmd":"stop"})");
        EXPECT_NE(c.read_type("error")["message"].get<std::string>().find("over"), std::string::npos);
    }
    t.join();
    EXPECT_EQ(server.result().final_tick, 20);
    EXPECT_EQ(server.result().reason, "tick_limit");
}
