#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace predmm {

class MalformedLog : public std::runtime_error {
public:
    MalformedLog(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Record kinds written by the engine, simulator and service.
namespace event_kind {
inline constexpr const char* kMarketOpened = "market_opened";
inline constexpr const char* kTraderJoined = "trader_joined";
inline constexpr const char* kQuoteRequested = "quote_requested";
inline constexpr const char* kQuoted = "quoted";
inline constexpr const char* kAccepted = "accepted";
inline constexpr const char* kCanceled = "canceled";
inline constexpr const char* kExpired = "expired";
inline constexpr const char* kPrice = "price";
inline constexpr const char* kTick = "tick";
inline constexpr const char* kWalkStep = "walk_step";
inline constexpr const char* kShock = "shock";
inline constexpr const char* kSettlement = "settlement";
inline constexpr const char* kSessionCreated = "session_created";
inline constexpr const char* kSessionStarted = "session_started";
inline constexpr const char* kSessionEnded = "session_ended";
}  // namespace event_kind

struct TradeEvent {
    std::uint64_t seq = 0;
    std::int64_t ts_ms = 0;
    std::string session;
    std::string kind;
    nlohmann::json payload;

    nlohmann::json to_json() const;
    static TradeEvent from_json(const nlohmann::json& j);
    friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

/// Append-only, in-memory event log with an optional JSON-lines file sink.
/// Sequence numbers start at 1 and timestamps never go backwards.
class EventLog {
public:
    using Listener = std::function<void(const TradeEvent&)>;

    explicit EventLog(std::string session);
    EventLog(std::string session, const std::filesystem::path& file);

    const TradeEvent& append(std::int64_t ts_ms, std::string kind, nlohmann::json payload);

    const std::vector<TradeEvent>& events() const { return events_; }
    const std::string& session() const { return session_; }
    std::int64_t last_ts() const { return events_.empty() ? 0 : events_.back().ts_ms; }

    /// Starts mirroring to a JSON-lines file opened for append. The first
    /// `already_written` events are assumed to be in the file already.
    void attach_file(const std::filesystem::path& file, std::size_t already_written);

    /// Called synchronously after each append.
    void set_listener(Listener listener) { listener_ = std::move(listener); }

private:
    std::string session_;
    std::vector<TradeEvent> events_;
    std::unique_ptr<std::ofstream> sink_;
    Listener listener_;
};

std::string to_line(const TradeEvent& event);
std::vector<TradeEvent> read_log(std::istream& in);
std::vector<TradeEvent> read_log(const std::filesystem::path& path);
void write_log(std::ostream& out, const std::vector<TradeEvent>& events);

}  // namespace predmm
