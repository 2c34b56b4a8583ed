#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "predmm/session.hpp"

namespace predmm::service {

struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Unauthorized : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Clock = std::function<std::int64_t()>;

/// Milliseconds since the Unix epoch.
std::int64_t system_clock_ms();

struct ServiceConfig {
    std::filesystem::path log_dir = "logs";
    std::filesystem::path registry = "logs/registry.json";
    /// When set, session administration needs `Authorization: Bearer <token>`.
    std::string admin_token;
};

/// Who is calling, resolved from a bearer token.
struct Caller {
    bool admin = false;
    std::optional<std::string> trader;
};

/// Owns every session, its log file and the registry that lists them.
///
/// Commands on one session are serialised by that session's mutex. Stream
/// callbacks run while the mutex is held and must only enqueue.
class SessionManager {
public:
    using StreamCallback = std::function<void(const std::string& message)>;

    /// Loads the registry, if present, and restores every session from its log.
    explicit SessionManager(ServiceConfig config, Clock clock = system_clock_ms);
    ~SessionManager();
    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    /// Creates a pending session. A missing id is generated.
    std::string create(nlohmann::json config);
    void start(const std::string& id);
    engine::SettlementReport end(const std::string& id);
    /// Registers a trader and returns their token.
    std::string join(const std::string& id, const std::string& trader);
    engine::Quote quote(const std::string& id, const std::string& market, const std::string& token, Side side,
                        std::int64_t qty);
    /// The session is the part of the quote id before its last ".q".
    engine::ConfirmRecord confirm(const std::string& quote_id, const std::string& token, bool accept);
    void shock(const std::string& id, const walk::ShockChange& change);
    nlohmann::json state(const std::string& id, const std::string& token);
    /// Settlement values and leaderboard; the market makers' results only for
    /// the operator.
    nlohmann::json settlement(const std::string& id, const std::string& token);

    /// Runs the timed work of every live session.
    void tick_all();

    /// Sends a snapshot, then every event `token`'s owner may see. An empty
    /// token subscribes as a spectator.
    std::uint64_t subscribe(const std::string& id, const std::string& token, StreamCallback callback);
    void unsubscribe(const std::string& id, std::uint64_t subscription);

    /// Resolves a bearer token for session `id`.
    Caller caller(const std::string& id, const std::string& token);
    bool is_admin(const std::string& token) const;
    void require_admin(const std::string& token) const;

    std::vector<std::string> sessions() const;
    std::filesystem::path log_path(const std::string& id) const;
    std::int64_t now() const { return clock_(); }

private:
    struct Entry;
    std::shared_ptr<Entry> find(const std::string& id) const;
    std::string trader_for(Entry& entry, const std::string& token) const;
    void save_registry();
    void load_registry();

    ServiceConfig config_;
    Clock clock_;
    mutable std::mutex mu_;  // guards sessions_ and the registry file
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t next_subscription_ = 1;
    std::uint64_t next_generated_id_ = 1;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// The REST API as a function of the request line, the Authorization header
/// and the body. Errors come back as {error, message} with a 4xx status.
ApiResponse handle_api(SessionManager& manager, const std::string& method, const std::string& target,
                       const std::string& authorization, const std::string& body);

/// Status code for an exception thrown by a session command.
int status_for(const std::exception& e);
std::string error_name(const std::exception& e);

/// HTTP and WebSocket front end on one port. The WebSocket endpoint is
/// /ws/sessions/{id}?token=...
class Server {
public:
    /// Binds immediately; throws std::runtime_error when the port is taken.
    /// Port 0 picks a free port.
    Server(SessionManager& manager, const std::string& address, unsigned short port,
           std::int64_t tick_interval_ms = 50);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    unsigned short port() const;
    /// Serves on a background thread until stop().
    void start();
    /// Serves on the calling thread until stop().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace predmm::service
