#include "arena/serve.hpp"

#include "arena/controllers.hpp"
#include "arena/frames.hpp"
#include "arena/replay.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

namespace arena {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

std::string_view mime_type(const std::filesystem::path &p) {
    const std::string ext = p.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".jsonl") return "application/x-ndjson";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    if (ext == ".map") return "application/json";
    return "application/octet-stream";
}

/// Maps a request target under `root`; nothing outside it.
std::optional<std::filesystem::path> resolve_under(const std::filesystem::path &root, std::string_view rel) {
    if (root.empty()) return std::nullopt;
    const auto q = rel.find('?');
    if (q != std::string_view::npos) rel = rel.substr(0, q);
    if (rel.find("..") != std::string_view::npos) return std::nullopt;
    while (!rel.empty() && rel.front() == '/') rel.remove_prefix(1);
    std::filesystem::path p = root / std::string(rel.empty() ? "index.html" : rel);
    if (std::filesystem::is_directory(p)) p /= "index.html";
    if (!std::filesystem::is_regular_file(p)) return std::nullopt;
    return p;
}

} // namespace

class WsSession;

struct SessionServer::Impl {
    ServeOptions opt;
    asio::io_context ioc;
    tcp::acceptor acceptor{ioc};
    asio::steady_timer tick_timer{ioc};
    asio::steady_timer stop_timer{ioc};
    std::chrono::steady_clock::time_point next_tick;

    std::shared_ptr<HumanInput> input = std::make_shared<HumanInput>();
    std::unique_ptr<Engine> engine;
    AgentId hero = kNoAgent;
    Tick frame_events_since = 0;
    std::shared_ptr<const std::string> last_state;
    std::shared_ptr<const std::string> end_msg;

    std::vector<std::weak_ptr<WsSession>> sessions; ///< connection order
    std::weak_ptr<WsSession> in_control;

    mutable std::mutex out_mutex; ///< guards what other threads may read
    MatchResult final_result;
    std::vector<std::string> log;

    explicit Impl(ServeOptions o);
    void accept();
    void schedule_tick();
    void on_tick();
    void broadcast(const std::shared_ptr<const std::string> &msg);
    void attach(const std::shared_ptr<WsSession> &s);
    void detach(const WsSession *s);
    void on_message(WsSession &s, std::string text);
    void note(const std::string &line);
    void finish();
    http::response<http::string_body> handle_http(const http::request<http::string_body> &req) const;
};

// ---- websocket session ------------------------------------------------------------

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, SessionServer::Impl *server)
        : ws_(std::move(socket)), server_(server) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->server_->attach(self);
            self->read();
        });
    }

    void send(std::shared_ptr<const std::string> msg) {
        if (closed_) return;
        constexpr std::size_t kMaxQueue = 256;
        if (queue_.size() >= kMaxQueue) { // client cannot keep up
            close();
            return;
        }
        queue_.push_back(std::move(msg));
        if (queue_.size() == 1) write();
    }

    void close() {
        if (closed_) return;
        closed_ = true;
        server_->detach(this);
        ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
    }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                if (!self->closed_) {
                    self->closed_ = true;
                    self->server_->detach(self.get());
                }
                return;
            }
            std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            if (!self->ws_.got_text()) {
                self->send(std::make_shared<const std::string>(error_frame("binary frames are not accepted")));
            } else {
                self->server_->on_message(*self, std::move(text));
            }
            self->read();
        });
    }

    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                if (!self->closed_) {
                    self->closed_ = true;
                    self->server_->detach(self.get());
                }
                return;
            }
            self->queue_.pop_front();
            if (!self->queue_.empty()) self->write();
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    SessionServer::Impl *server_;
    beast::flat_buffer buffer_;
    std::deque<std::shared_ptr<const std::string>> queue_;
    bool closed_ = false;
};

// ---- http ---------------------------------------------------------------------------

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, SessionServer::Impl *server)
        : stream_(std::move(socket)), server_(server) {}

    void run() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return;
            if (websocket::is_upgrade(self->req_)) {
                std::make_shared<WsSession>(self->stream_.release_socket(), self->server_)->run(std::move(self->req_));
                return;
            }
            self->res_ = self->server_->handle_http(self->req_);
            http::async_write(self->stream_, self->res_, [self](beast::error_code, std::size_t) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
            });
        });
    }

private:
    beast::tcp_stream stream_;
    SessionServer::Impl *server_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    http::response<http::string_body> res_;
};

// ---- server -------------------------------------------------------------------------

SessionServer::Impl::Impl(ServeOptions o) : opt(std::move(o)) {
    if (opt.tick_rate <= 0 || opt.ticks_per_frame <= 0) throw std::invalid_argument("tick and frame rates must be positive");
    if (opt.max_ticks <= 0) throw std::invalid_argument("max_ticks must be positive");
    ControllerBundle a = opt.support.value_or(ControllerBundle{});
    if (!opt.support) {
        a.controllers[AgentKind::Minion] = controller_factory("minion-fsm");
        a.controller_names[AgentKind::Minion] = "minion-fsm";
    }
    a.name = "human";
    a.controllers[AgentKind::Hero] = [in = input] { return std::make_unique<HumanController>(in); };
    a.controller_names[AgentKind::Hero] = "human";
    EngineOptions eo;
    eo.rules = opt.rules;
    eo.seed = opt.seed;
    engine = std::make_unique<Engine>(opt.map, std::move(a), opt.opponent, eo);
    for (const auto &ag : engine->world().agents) {
        if (ag.team == Team::A && ag.kind == AgentKind::Hero) hero = ag.id;
    }
    last_state = std::make_shared<const std::string>(state_frame(*engine, 0, hero));
}

void SessionServer::Impl::accept() {
    acceptor.async_accept([self = this](beast::error_code ec, tcp::socket socket) {
        if (ec) return; // acceptor closed
        std::make_shared<HttpSession>(std::move(socket), self)->run();
        self->accept();
    });
}

void SessionServer::Impl::schedule_tick() {
    next_tick += std::chrono::nanoseconds(1'000'000'000LL / opt.tick_rate);
    tick_timer.expires_at(next_tick);
    tick_timer.async_wait([self = this](beast::error_code ec) {
        if (!ec) self->on_tick();
    });
}

void SessionServer::Impl::on_tick() {
    if (engine->ended()) return;
    engine->step();
    if (!engine->ended() && engine->world().tick >= opt.max_ticks) engine->finish_at_limit();
    const Tick t = engine->world().tick;
    if (t % opt.ticks_per_frame == 0 || engine->ended()) {
        last_state = std::make_shared<const std::string>(state_frame(*engine, frame_events_since, hero));
        frame_events_since = t;
        broadcast(last_state);
    }
    if (engine->ended()) {
        finish();
        return;
    }
    schedule_tick();
}

void SessionServer::Impl::finish() {
    const MatchResult r = engine->result();
    {
        std::lock_guard lock(out_mutex);
        final_result = r;
    }
    end_msg = std::make_shared<const std::string>(end_frame(r));
    broadcast(end_msg);
    if (opt.max_seconds <= 0.0) {
        stop_timer.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(opt.linger_seconds)));
        stop_timer.async_wait([self = this](beast::error_code ec) {
            if (!ec) self->ioc.stop();
        });
    }
}

void SessionServer::Impl::broadcast(const std::shared_ptr<const std::string> &msg) {
    auto live = sessions; // send() may detach
    for (auto &w : live) {
        if (auto s = w.lock()) s->send(msg);
    }
}

void SessionServer::Impl::attach(const std::shared_ptr<WsSession> &s) {
    if (auto prev = in_control.lock()) prev->send(std::make_shared<const std::string>(json{{"type", "control"}, {"control", false}}.dump()));
    sessions.push_back(s);
    in_control = s;
    input->set_connected(true);
    note(fmt::format("{} connect", engine->world().tick));
    s->send(std::make_shared<const std::string>(json{{"type", "hello"},
                                                     {"hero", hero},
                                                     {"control", true},
                                                     {"tick_rate", opt.tick_rate},
                                                     {"frame_rate", opt.tick_rate / opt.ticks_per_frame},
                                                     {"seed", opt.seed},
                                                     {"opponent", opt.opponent.name}}
                                                    .dump()));
    s->send(std::make_shared<const std::string>(map_frame(opt.map)));
    s->send(last_state);
    if (end_msg) s->send(end_msg);
}

void SessionServer::Impl::detach(const WsSession *s) {
    std::erase_if(sessions, [s](const std::weak_ptr<WsSession> &w) {
        auto p = w.lock();
        return !p || p.get() == s;
    });
    auto ctl = in_control.lock();
    if (ctl && ctl.get() != s) return;
    note(fmt::format("{} disconnect", engine->world().tick));
    in_control.reset();
    // Control passes to the newest remaining client, if any.
    for (auto it = sessions.rbegin(); it != sessions.rend(); ++it) {
        if (auto next = it->lock()) {
            in_control = next;
            next->send(std::make_shared<const std::string>(json{{"type", "control"}, {"control", true}}.dump()));
            return;
        }
    }
    input->set_connected(false);
}

void SessionServer::Impl::on_message(WsSession &s, std::string text) {
    const Tick t = engine->world().tick;
    auto reject = [&](const std::string &why) {
        note(fmt::format("{} reject {} {}", t, why, text));
        s.send(std::make_shared<const std::string>(error_frame(why)));
    };
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &) {
        reject("frame is not valid JSON");
        return;
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        reject("frame needs a string \"type\"");
        return;
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "ping") {
        s.send(std::make_shared<const std::string>(json{{"type", "pong"}, {"tick", t}}.dump()));
        return;
    }
    if (type != "cmd") {
        reject("unknown frame type \"" + type + "\"");
        return;
    }
    if (in_control.lock().get() != &s) {
        reject("this connection does not control the hero");
        return;
    }
    if (engine->ended()) {
        reject("match is over");
        return;
    }
    try {
        input->push(parse_player_command(text));
        note(fmt::format("{} accept {}", t, text));
    } catch (const std::exception &e) {
        reject(e.what());
    }
}

void SessionServer::Impl::note(const std::string &line) {
    std::lock_guard lock(out_mutex);
    log.push_back(line);
}

http::response<http::string_body> SessionServer::Impl::handle_http(const http::request<http::string_body> &req) const {
    auto reply = [&](http::status st, std::string_view type, std::string body) {
        http::response<http::string_body> res{st, req.version()};
        res.set(http::field::server, "arena");
        res.set(http::field::content_type, std::string(type));
        res.set(http::field::cache_control, "no-store");
        res.keep_alive(false);
        res.body() = std::move(body);
        res.prepare_payload();
        return res;
    };
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
        return reply(http::status::method_not_allowed, "text/plain", "GET only\n");
    }
    const std::string_view target(req.target().data(), req.target().size());
    if (target == "/state") return reply(http::status::ok, "application/json", *last_state);
    if (target == "/map") return reply(http::status::ok, "application/json", map_frame(opt.map));
    if (target == "/health") {
        return reply(http::status::ok, "application/json",
                     json{{"ok", true}, {"tick", engine->world().tick}, {"ended", engine->ended()}}.dump());
    }
    std::optional<std::filesystem::path> file;
    if (target.rfind("/replays/", 0) == 0) file = resolve_under(opt.replay_dir, target.substr(9));
    else file = resolve_under(opt.static_dir, target);
    if (!file) return reply(http::status::not_found, "text/plain", "not found\n");
    std::ifstream in(*file, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    return reply(http::status::ok, mime_type(*file), body.str());
}

SessionServer::SessionServer(ServeOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

SessionServer::~SessionServer() {
    impl_->ioc.stop();
}

unsigned short SessionServer::listen() {
    auto &acc = impl_->acceptor;
    const tcp::endpoint ep(asio::ip::make_address(impl_->opt.address), impl_->opt.port);
    acc.open(ep.protocol());
    acc.set_option(asio::socket_base::reuse_address(true));
    acc.bind(ep);
    acc.listen(asio::socket_base::max_listen_connections);
    return acc.local_endpoint().port();
}

void SessionServer::run() {
    Impl &m = *impl_;
    if (!m.acceptor.is_open()) listen();
    m.accept();
    m.next_tick = std::chrono::steady_clock::now();
    m.schedule_tick();
    if (m.opt.max_seconds > 0.0) {
        m.stop_timer.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(m.opt.max_seconds)));
        m.stop_timer.async_wait([&m](beast::error_code ec) {
            if (!ec) m.ioc.stop();
        });
    }
    m.ioc.run();
    std::lock_guard lock(m.out_mutex);
    m.final_result = m.engine->result();
}

void SessionServer::stop() {
    asio::post(impl_->ioc, [m = impl_.get()] { m->ioc.stop(); });
}

AgentId SessionServer::human_hero() const { return impl_->hero; }

MatchResult SessionServer::result() const {
    std::lock_guard lock(impl_->out_mutex);
    return impl_->final_result;
}

std::vector<std::string> SessionServer::session_log() const {
    std::lock_guard lock(impl_->out_mutex);
    return impl_->log;
}

bool run_serve(const ServeOptions &options) {
    SessionServer server(options);
    unsigned short port = 0;
    try {
        port = server.listen();
    } catch (const std::exception &e) {
        std::cerr << fmt::format("cannot listen on {}:{}: {}\n", options.address, options.port, e.what());
        return false;
    }
    std::cerr << fmt::format("serving {} vs {} on http://{}:{}/ (websocket on the same port)\n", "human",
                             options.opponent.name, options.address, port);
    server.run();
    const MatchResult r = server.result();
    std::cerr << fmt::format("session over at tick {}: {} ({})\n", r.final_tick, outcome_name(r.outcome), r.reason);
    return true;
}

} // namespace arena
