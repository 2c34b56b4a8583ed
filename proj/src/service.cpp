#include "predmm/service.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <csignal>
#include <deque>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "predmm/json.hpp"

namespace predmm::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::int64_t system_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

namespace {

bool valid_session_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(),
                       [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

std::string random_token() {
    std::random_device rd;
    std::ostringstream out;
    for (int i = 0; i < 4; ++i) {
        char buf[9];
        std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
        out << buf;
    }
    return out.str();
}

// A crash can leave half a line at the end of the log; drop it.
void drop_partial_line(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    if (text.empty() || text.back() == '\n') return;
    auto cut = text.rfind('\n');
    fs::resize_file(path, cut == std::string::npos ? 0 : cut + 1);
}

}  // namespace

struct SessionManager::Entry {
    struct Subscriber {
        std::optional<std::string> trader;
        StreamCallback callback;
    };

    std::mutex mu;
    std::string id;
    fs::path log_path;
    std::shared_ptr<EventLog> log;
    std::unique_ptr<session::Session> session;
    std::map<std::string, std::string> tokens;  // trader -> token
    std::map<std::uint64_t, Subscriber> subscribers;

    void attach_listener() {
        log->set_listener([this](const TradeEvent& e) {
            if (subscribers.empty()) return;
            std::int64_t ends = session ? session->ends_at().value_or(0) : 0;
            for (const auto& [n, sub] : subscribers)
                if (auto msg = session::Session::visible(e, sub.trader, ends)) sub.callback(msg->dump());
        });
    }
};

SessionManager::SessionManager(ServiceConfig config, Clock clock) : config_(std::move(config)), clock_(std::move(clock)) {
    fs::create_directories(config_.log_dir);
    load_registry();
}

SessionManager::~SessionManager() = default;

fs::path SessionManager::log_path(const std::string& id) const { return config_.log_dir / (id + ".jsonl"); }

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("unknown session " + id);
    return it->second;
}

std::vector<std::string> SessionManager::sessions() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> ids;
    for (const auto& [id, e] : sessions_) ids.push_back(id);
    return ids;
}

bool SessionManager::is_admin(const std::string& token) const {
    return config_.admin_token.empty() || token == config_.admin_token;
}

void SessionManager::require_admin(const std::string& token) const {
    if (!is_admin(token)) throw Unauthorized("operator token required");
}

std::string SessionManager::trader_for(Entry& entry, const std::string& token) const {
    if (!token.empty())
        for (const auto& [trader, t] : entry.tokens)
            if (t == token) return trader;
    throw Unauthorized("unknown trader token");
}

Caller SessionManager::caller(const std::string& id, const std::string& token) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    Caller c;
    for (const auto& [trader, t] : e->tokens)
        if (!token.empty() && t == token) c.trader = trader;
    c.admin = !c.trader && (config_.admin_token.empty() ? token.empty() : token == config_.admin_token);
    if (!token.empty() && !c.trader && !c.admin) throw Unauthorized("unknown token");
    return c;
}

void SessionManager::save_registry() {
    json list = json::array();
    for (const auto& [id, e] : sessions_) list.push_back({{"id", id}, {"log", e->log_path.string()}, {"tokens", e->tokens}});
    json doc = {{"schema", session::kSchema}, {"sessions", list}};
    if (config_.registry.has_parent_path()) fs::create_directories(config_.registry.parent_path());
    fs::path tmp = config_.registry;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << doc.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write registry " + tmp.string());
    }
    fs::rename(tmp, config_.registry);
}

void SessionManager::load_registry() {
    if (!fs::exists(config_.registry)) return;
    json doc;
    try {
        std::ifstream in(config_.registry);
        doc = json::parse(in);
    } catch (const std::exception& ex) {
        throw std::runtime_error("cannot read registry " + config_.registry.string() + ": " + ex.what());
    }
    for (const auto& item : doc.value("sessions", json::array())) {
        auto e = std::make_shared<Entry>();
        e->id = item.at("id").get<std::string>();
        e->log_path = item.at("log").get<std::string>();
        e->tokens = item.value("tokens", std::map<std::string, std::string>{});
        try {
            drop_partial_line(e->log_path);
            auto events = read_log(e->log_path);
            e->log = std::make_shared<EventLog>(e->id);
            e->attach_listener();
            e->session = session::Session::restore(events, e->log, true);
            e->log->attach_file(e->log_path, events.size());
        } catch (const std::exception& ex) {
            throw std::runtime_error("cannot restore session " + e->id + " from " + e->log_path.string() + ": " +
                                     ex.what());
        }
        sessions_[e->id] = e;
    }
}

std::string SessionManager::create(json config) {
    if (!config.is_object()) throw session::ValidationError("session config must be an object");
    std::lock_guard lock(mu_);
    if (config.value("id", std::string()).empty()) {
        std::string id;
        do {
            id = "s" + std::to_string(next_generated_id_++);
        } while (sessions_.count(id) || fs::exists(log_path(id)));
        config["id"] = id;
    }
    auto cfg = session::SessionConfig::from_json(config);
    if (!valid_session_id(cfg.id)) throw session::ValidationError("invalid session id: '" + cfg.id + "'");
    cfg.validate();
    if (sessions_.count(cfg.id) || fs::exists(log_path(cfg.id)))
        throw session::DuplicateId("session already exists: " + cfg.id);

    auto e = std::make_shared<Entry>();
    e->id = cfg.id;
    e->log_path = log_path(cfg.id);
    e->log = std::make_shared<EventLog>(cfg.id, e->log_path);
    e->attach_listener();
    try {
        e->session = std::make_unique<session::Session>(cfg, clock_(), e->log);
    } catch (...) {
        e->log.reset();
        fs::remove(e->log_path);
        throw;
    }
    sessions_[cfg.id] = e;
    save_registry();
    return cfg.id;
}

void SessionManager::start(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    e->session->start(clock_());
}

engine::SettlementReport SessionManager::end(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    return e->session->end(clock_());
}

std::string SessionManager::join(const std::string& id, const std::string& trader) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    e->session->join(trader, clock_());
    auto token = random_token();
    // tokens change under both locks so the registry writer may read them
    std::lock_guard reg(mu_);
    e->tokens[trader] = token;
    save_registry();
    return token;
}

engine::Quote SessionManager::quote(const std::string& id, const std::string& market, const std::string& token,
                                    Side side, std::int64_t qty) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    auto trader = trader_for(*e, token);
    return e->session->request_quote(market, trader, side, qty, clock_());
}

engine::ConfirmRecord SessionManager::confirm(const std::string& quote_id, const std::string& token, bool accept) {
    auto cut = quote_id.rfind(".q");
    if (cut == std::string::npos || cut == 0) throw engine::UnknownQuote("unknown quote " + quote_id);
    std::shared_ptr<Entry> e;
    try {
        e = find(quote_id.substr(0, cut));
    } catch (const NotFound&) {
        throw engine::UnknownQuote("unknown quote " + quote_id);
    }
    std::lock_guard lock(e->mu);
    auto trader = trader_for(*e, token);
    return e->session->confirm(quote_id, trader, accept, clock_());
}

void SessionManager::shock(const std::string& id, const walk::ShockChange& change) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    e->session->shock(change, clock_());
}

json SessionManager::state(const std::string& id, const std::string& token) {
    auto c = caller(id, token);
    auto e = find(id);
    std::lock_guard lock(e->mu);
    auto now = clock_();
    e->session->tick(now);
    return e->session->snapshot(c.trader, now);
}

json SessionManager::settlement(const std::string& id, const std::string& token) {
    auto c = caller(id, token);
    auto e = find(id);
    std::lock_guard lock(e->mu);
    e->session->tick(clock_());
    const auto& report = e->session->engine().settlement();
    if (!report) throw session::NotEnded("session " + id + " has not been settled");
    json j = report->to_json();
    if (c.admin) return j;
    return {{"values", j["values"]}, {"leaderboard", j["leaderboard"]}};
}

void SessionManager::tick_all() {
    std::vector<std::shared_ptr<Entry>> entries;
    {
        std::lock_guard lock(mu_);
        for (const auto& [id, e] : sessions_) entries.push_back(e);
    }
    for (const auto& e : entries) {
        std::lock_guard lock(e->mu);
        if (e->session->phase() != session::Phase::Live) continue;
        try {
            e->session->tick(clock_());
        } catch (const std::exception& ex) {
            std::cerr << json{{"level", "error"}, {"session", e->id}, {"msg", ex.what()}}.dump() << '\n';
        }
    }
}

std::uint64_t SessionManager::subscribe(const std::string& id, const std::string& token, StreamCallback callback) {
    auto c = caller(id, token);
    auto e = find(id);
    std::uint64_t n;
    {
        std::lock_guard reg(mu_);
        n = next_subscription_++;
    }
    std::lock_guard lock(e->mu);
    auto now = clock_();
    e->session->tick(now);
    callback(json{{"schema", session::kSchema},
                  {"kind", "snapshot"},
                  {"ts_ms", now},
                  {"payload", e->session->snapshot(c.trader, now)}}
                 .dump());
    e->subscribers[n] = {c.trader, std::move(callback)};
    return n;
}

void SessionManager::unsubscribe(const std::string& id, std::uint64_t subscription) {
    std::shared_ptr<Entry> e;
    try {
        e = find(id);
    } catch (const NotFound&) {
        return;
    }
    std::lock_guard lock(e->mu);
    e->subscribers.erase(subscription);
}

// --- REST -----------------------------------------------------------------

int status_for(const std::exception& e) {
    if (dynamic_cast<const Unauthorized*>(&e)) return 401;
    if (dynamic_cast<const NotFound*>(&e) || dynamic_cast<const engine::UnknownMarket*>(&e) ||
        dynamic_cast<const engine::UnknownQuote*>(&e) || dynamic_cast<const engine::UnknownTrader*>(&e))
        return 404;
    if (dynamic_cast<const session::DuplicateId*>(&e) || dynamic_cast<const session::AlreadyStarted*>(&e) ||
        dynamic_cast<const session::NotStarted*>(&e) || dynamic_cast<const session::NotEnded*>(&e) ||
        dynamic_cast<const engine::QuoteNotOpen*>(&e))
        return 409;
    if (dynamic_cast<const engine::QuoteExpired*>(&e) || dynamic_cast<const engine::SessionClosed*>(&e)) return 410;
    if (dynamic_cast<const engine::InsufficientFunds*>(&e) || dynamic_cast<const engine::InsufficientShares*>(&e))
        return 422;
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const engine::InvalidQty*>(&e) ||
        dynamic_cast<const nlohmann::json::exception*>(&e))
        return 400;
    return 500;
}

std::string error_name(const std::exception& e) {
#define PREDMM_NAME(T, name) \
    if (dynamic_cast<const T*>(&e)) return name;
    PREDMM_NAME(Unauthorized, "Unauthorized")
    PREDMM_NAME(NotFound, "NotFound")
    PREDMM_NAME(engine::UnknownMarket, "UnknownMarket")
    PREDMM_NAME(engine::UnknownQuote, "UnknownQuote")
    PREDMM_NAME(engine::UnknownTrader, "UnknownTrader")
    PREDMM_NAME(session::DuplicateId, "DuplicateId")
    PREDMM_NAME(session::AlreadyStarted, "AlreadyStarted")
    PREDMM_NAME(session::NotStarted, "NotStarted")
    PREDMM_NAME(session::NotEnded, "NotEnded")
    PREDMM_NAME(engine::QuoteNotOpen, "QuoteNotOpen")
    PREDMM_NAME(engine::QuoteExpired, "QuoteExpired")
    PREDMM_NAME(engine::SessionClosed, "SessionClosed")
    PREDMM_NAME(engine::InsufficientFunds, "InsufficientFunds")
    PREDMM_NAME(engine::InsufficientShares, "InsufficientShares")
    PREDMM_NAME(engine::InvalidQty, "InvalidQty")
    PREDMM_NAME(session::ValidationError, "ValidationError")
    PREDMM_NAME(nlohmann::json::exception, "ValidationError")
    PREDMM_NAME(std::invalid_argument, "ValidationError")
#undef PREDMM_NAME
    return "InternalError";
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(path);
    while (std::getline(in, part, '/'))
        if (!part.empty()) parts.push_back(part);
    return parts;
}

std::string bearer(const std::string& authorization) {
    const std::string prefix = "Bearer ";
    if (authorization.rfind(prefix, 0) == 0) return authorization.substr(prefix.size());
    return {};
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    auto j = json::parse(body);
    if (!j.is_object()) throw session::ValidationError("request body must be a JSON object");
    return j;
}

std::int64_t integer_field(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw session::ValidationError(std::string(key) + " must be an integer");
    return j.at(key).get<std::int64_t>();
}

struct MethodNotAllowed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ApiResponse route(SessionManager& m, const std::string& method, const std::vector<std::string>& p,
                  const std::string& token, const std::string& body) {
    auto need = [&](const char* verb) {
        if (method != verb) throw MethodNotAllowed(method + " not allowed here");
    };
    const auto n = p.size();
    if (n == 1 && p[0] == "health") {
        need("GET");
        return {200, {{"status", "ok"}, {"schema", session::kSchema}, {"sessions", m.sessions().size()}}};
    }
    if (n < 2 || p[0] != "api") throw NotFound("no such endpoint");

    if (p[1] == "sessions" && n == 2) {
        if (method == "GET") return {200, {{"sessions", m.sessions()}}};
        need("POST");
        m.require_admin(token);
        return {201, {{"id", m.create(parse_body(body))}}};
    }
    if (p[1] == "quotes" && n == 3) {
        need("POST");
        auto req = parse_body(body);
        if (!req.contains("accept") || !req.at("accept").is_boolean())
            throw session::ValidationError("accept must be true or false");
        return {200, m.confirm(p[2], token, req.at("accept").get<bool>()).to_json()};
    }
    if (p[1] != "sessions" || n < 4) throw NotFound("no such endpoint");

    const auto& id = p[2];
    const auto& what = p[3];
    if (n == 4 && what == "start") {
        need("POST");
        m.require_admin(token);
        m.start(id);
        auto s = m.state(id, {});
        return {200, {{"id", id}, {"phase", s["phase"]}, {"started_at", s["started_at"]}, {"ends_at", s["ends_at"]}}};
    }
    if (n == 4 && what == "end") {
        need("POST");
        m.require_admin(token);
        return {200, m.end(id).to_json()};
    }
    if (n == 4 && what == "traders") {
        need("POST");
        auto req = parse_body(body);
        auto trader = req.value("trader", std::string());
        auto t = m.join(id, trader);
        return {201, {{"trader", trader}, {"token", t}}};
    }
    if (n == 4 && what == "state") {
        need("GET");
        return {200, m.state(id, token)};
    }
    if (n == 4 && what == "shocks") {
        need("POST");
        m.require_admin(token);
        auto change = parse_body(body).get<walk::ShockChange>();
        m.shock(id, change);
        return {200, {{"applied", change}}};
    }
    if (n == 4 && what == "settlement") {
        need("GET");
        return {200, m.settlement(id, token)};
    }
    if (n == 6 && what == "markets" && p[5] == "quotes") {
        need("POST");
        auto req = parse_body(body);
        auto side = side_from_string(req.value("side", std::string()));
        auto q = m.quote(id, p[4], token, side, integer_field(req, "qty"));
        return {200,
                {{"quote_id", q.id},
                 {"market", q.market},
                 {"side", to_string(q.side)},
                 {"qty", q.qty},
                 {"vwap", q.vwap},
                 {"expires_at", q.expires_at}}};
    }
    throw NotFound("no such endpoint");
}

}  // namespace

ApiResponse handle_api(SessionManager& manager, const std::string& method, const std::string& target,
                       const std::string& authorization, const std::string& body) {
    auto path = target.substr(0, target.find('?'));
    try {
        return route(manager, method, split_path(path), bearer(authorization), body);
    } catch (const MethodNotAllowed& e) {
        return {405, {{"error", "MethodNotAllowed"}, {"message", e.what()}}};
    } catch (const std::exception& e) {
        return {status_for(e), {{"error", error_name(e)}, {"message", e.what()}}};
    }
}

// --- HTTP and WebSocket -----------------------------------------------------

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

constexpr std::size_t kMaxQueued = 10000;

std::string query_param(const std::string& target, const std::string& key) {
    auto q = target.find('?');
    if (q == std::string::npos) return {};
    std::istringstream in(target.substr(q + 1));
    std::string pair;
    while (std::getline(in, pair, '&')) {
        auto eq = pair.find('=');
        if (pair.substr(0, eq) == key) return eq == std::string::npos ? std::string() : pair.substr(eq + 1);
    }
    return {};
}

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket&& socket, SessionManager& manager, std::string id, std::string token)
        : ws_(std::move(socket)), manager_(manager), id_(std::move(id)), token_(std::move(token)) {}

    ~WsSession() { finish(); }

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        std::weak_ptr<WsSession> weak = shared_from_this();
        auto ex = ws_.get_executor();
        try {
            subscription_ = manager_.subscribe(id_, token_, [weak, ex](const std::string& msg) {
                net::post(ex, [weak, msg] {
                    if (auto self = weak.lock()) self->send(msg);
                });
            });
        } catch (const std::exception& e) {
            ws_.async_close(websocket::close_reason(websocket::close_code::policy_error, e.what()),
                            [self = shared_from_this()](beast::error_code) {});
            return;
        }
        do_read();
    }

    // Incoming frames are ignored; reading keeps pings and close frames flowing.
    void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            finish();
            return;
        }
        buffer_.consume(buffer_.size());
        do_read();
    }

    void send(const std::string& msg) {
        if (!subscription_) return;
        if (queue_.size() >= kMaxQueued) {
            finish();
            beast::error_code ignored;
            beast::get_lowest_layer(ws_).socket().close(ignored);
            return;
        }
        queue_.push_back(msg);
        if (queue_.size() == 1) do_write();
    }

    void do_write() {
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()),
                        beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            finish();
            return;
        }
        queue_.pop_front();
        if (!queue_.empty()) do_write();
    }

    void finish() {
        if (subscription_) {
            manager_.unsubscribe(id_, *subscription_);
            subscription_.reset();
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    SessionManager& manager_;
    std::string id_;
    std::string token_;
    std::optional<std::uint64_t> subscription_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, SessionManager& manager) : stream_(std::move(socket)), manager_(manager) {}

    void run() { net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this())); }

private:
    void do_read() {
        parser_.emplace();
        parser_->body_limit(1 << 20);
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec == http::error::end_of_stream) {
            stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
            return;
        }
        if (ec) return;
        auto req = parser_->release();
        std::string target(req.target());

        if (websocket::is_upgrade(req)) {
            auto parts = split_path(target.substr(0, target.find('?')));
            if (parts.size() != 3 || parts[0] != "ws" || parts[1] != "sessions") {
                reply(req, {404, {{"error", "NotFound"}, {"message", "no such stream"}}});
                return;
            }
            auto token = query_param(target, "token");
            try {
                manager_.caller(parts[2], token);
            } catch (const std::exception& e) {
                reply(req, {status_for(e), {{"error", error_name(e)}, {"message", e.what()}}});
                return;
            }
            stream_.expires_never();
            std::make_shared<WsSession>(stream_.release_socket(), manager_, parts[2], token)->run(std::move(req));
            return;
        }

        std::string auth(req[http::field::authorization]);
        reply(req, handle_api(manager_, std::string(req.method_string()), target, auth, req.body()));
    }

    void reply(const http::request<http::string_body>& req, const ApiResponse& api) {
        auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(api.status),
                                                                       req.version());
        res->set(http::field::content_type, "application/json");
        res->set(http::field::access_control_allow_origin, "*");
        res->keep_alive(req.keep_alive());
        res->body() = api.body.dump();
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec) return;
            if (!res->keep_alive()) {
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
                return;
            }
            self->do_read();
        });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    std::optional<http::request_parser<http::string_body>> parser_;
    SessionManager& manager_;
};

}  // namespace

struct Server::Impl {
    Impl(SessionManager& m, const std::string& address, unsigned short port, std::int64_t tick_ms)
        : manager(m), acceptor(ioc), timer(ioc), tick_interval(tick_ms) {
        beast::error_code ec;
        tcp::endpoint ep(net::ip::make_address(address, ec), port);
        if (ec) throw std::invalid_argument("bad listen address " + address + ": " + ec.message());
        acceptor.open(ep.protocol(), ec);
        if (!ec) acceptor.bind(ep, ec);
        if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
        if (ec)
            throw std::runtime_error("cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
    }

    void begin() {
        do_accept();
        schedule_tick();
    }

    void do_accept() {
        acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (!acceptor.is_open()) return;
            if (!ec) std::make_shared<HttpSession>(std::move(socket), manager)->run();
            do_accept();
        });
    }

    void schedule_tick() {
        timer.expires_after(std::chrono::milliseconds(tick_interval));
        timer.async_wait([this](beast::error_code ec) {
            if (ec) return;
            manager.tick_all();
            schedule_tick();
        });
    }

    SessionManager& manager;
    net::io_context ioc{1};
    tcp::acceptor acceptor;
    net::steady_timer timer;
    std::int64_t tick_interval;
    std::thread thread;
};

Server::Server(SessionManager& manager, const std::string& address, unsigned short port, std::int64_t tick_interval_ms)
    : impl_(std::make_unique<Impl>(manager, address, port, tick_interval_ms)) {}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::start() {
    impl_->begin();
    impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::run() {
    net::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
    signals.async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
    impl_->begin();
    impl_->ioc.run();
}

void Server::stop() {
    if (!impl_) return;
    impl_->ioc.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace predmm::service
