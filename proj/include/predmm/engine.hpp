#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "predmm/event_log.hpp"
#include "predmm/market_maker.hpp"
#include "predmm/types.hpp"

namespace predmm::engine {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SessionClosed : EngineError {
    using EngineError::EngineError;
};
struct UnknownTrader : EngineError {
    using EngineError::EngineError;
};
struct UnknownMarket : EngineError {
    using EngineError::EngineError;
};
struct UnknownQuote : EngineError {
    using EngineError::EngineError;
};
struct InvalidQty : EngineError {
    using EngineError::EngineError;
};
struct QuoteExpired : EngineError {
    using EngineError::EngineError;
};
struct QuoteNotOpen : EngineError {
    using EngineError::EngineError;
};
struct InsufficientFunds : EngineError {
    using EngineError::EngineError;
};
struct InsufficientShares : EngineError {
    using EngineError::EngineError;
};
struct ReplayMismatch : EngineError {
    using EngineError::EngineError;
};

enum class QuoteState { Open, Accepted, Canceled, Expired };
std::string to_string(QuoteState s);

struct Quote {
    std::string id;
    std::string market;
    std::string trader;
    Side side = Side::Buy;
    std::int64_t qty = 0;
    double vwap = 0.0;
    double spot_at_quote = 0.0;
    std::int64_t issued_at = 0;
    std::int64_t expires_at = 0;
    QuoteState state = QuoteState::Open;
    std::uint64_t number = 0;

    nlohmann::json to_json() const;
};

struct Endowment {
    double cash = 100000.0;
    double shares = 0.0;  // per market
    bool short_allowed = true;
};

struct Account {
    std::string trader;
    double cash = 0.0;
    std::map<std::string, double> positions;
    bool short_allowed = true;
    double initial_cash = 0.0;
    std::map<std::string, double> initial_positions;
    std::map<std::string, double> cash_flow;  // per market, trader's view

    nlohmann::json to_json() const;
};

/// Market maker plus its double-entry ledger for one market.
struct Market {
    std::string id;
    MarketMakerState mm;
    PriceBand band;
    double mm_cash = 0.0;       // cash received minus cash paid
    double mm_short = 0.0;      // shares sold minus shares bought
    std::int64_t buys = 0;
    std::int64_t sells = 0;
    std::int64_t cancels = 0;

    double spot() const { return predmm::spot(mm, band); }
};

struct EngineConfig {
    std::int64_t quote_ttl_ms = 10000;
    PriceBand band{};
};

/// Outcome of confirm_quote.
struct ConfirmRecord {
    std::string quote_id;
    std::string market;
    std::string trader;
    Side side = Side::Buy;
    bool filled = false;
    std::int64_t qty = 0;
    double price = 0.0;
    double cash_delta = 0.0;      // trader's view
    double position_delta = 0.0;
    double spot_after = 0.0;

    nlohmann::json to_json() const;
};

struct TraderResult {
    std::string trader;
    double pnl = 0.0;
    double final_wealth = 0.0;
};

struct SettlementReport {
    std::map<std::string, double> values;        // settlement price per market
    std::map<std::string, double> mm_profit;     // per market
    std::map<std::string, double> trader_pnl;    // per market, summed over traders
    std::vector<TraderResult> leaderboard;       // by final wealth, best first

    nlohmann::json to_json() const;
    static SettlementReport from_json(const nlohmann::json& j);
};

enum class Phase { Live, Closed, Settled };

/// The dealer market for one session. Every state change is appended to the
/// session event log, and replaying that log through a fresh engine
/// reproduces the same log and state.
class Engine {
public:
    explicit Engine(std::string session, EngineConfig config = {}, std::shared_ptr<EventLog> log = nullptr);

    void open_market(const std::string& id, MarketMakerState mm, std::int64_t now_ms,
                     std::optional<PriceBand> band = std::nullopt);
    void register_trader(const std::string& trader, const Endowment& endowment, std::int64_t now_ms);

    /// Quotes on committed state without mutating the market maker. An open
    /// quote held by the same trader in the same market is canceled first.
    Quote request_quote(const std::string& market, const std::string& trader, Side side, std::int64_t qty,
                        std::int64_t now_ms);

    ConfirmRecord confirm_quote(const std::string& quote_id, bool accept, std::int64_t now_ms);

    /// Expires every open quote whose deadline has passed. Returns how many.
    std::size_t expire_due(std::int64_t now_ms);

    /// Earliest deadline among open quotes.
    std::optional<std::int64_t> next_expiry() const;

    /// Stops quoting; outstanding quotes expire.
    void close(std::int64_t now_ms);

    SettlementReport settle(const std::map<std::string, double>& values, std::int64_t now_ms);

    /// Re-executes one recorded event. Derived records are skipped and
    /// foreign kinds are copied into this engine's log unchanged.
    void apply(const TradeEvent& event);

    /// Appends a record the engine does not interpret (walk steps, shocks,
    /// session lifecycle), keeping the engine clock in step with the log.
    const TradeEvent& record(std::int64_t now_ms, const std::string& kind, nlohmann::json payload);

    static Engine replay(const std::vector<TradeEvent>& events, bool verify = true);

    const Market& market(const std::string& id) const;
    const Account& account(const std::string& trader) const;
    const Quote& quote(const std::string& id) const;
    const std::map<std::string, Market>& markets() const { return markets_; }
    const std::map<std::string, Account>& accounts() const { return accounts_; }
    std::optional<std::string> open_quote_of(const std::string& trader, const std::string& market) const;

    Phase phase() const { return phase_; }
    const std::optional<SettlementReport>& settlement() const { return settlement_; }
    const std::string& session() const { return session_; }
    EventLog& log() { return *log_; }
    const EventLog& log() const { return *log_; }
    const EngineConfig& config() const { return config_; }

private:
    Market& market_mut(const std::string& id);
    Account& account_mut(const std::string& trader);
    void end_quote(Quote& q, QuoteState state, const char* kind, const std::string& reason, std::int64_t now_ms,
                   bool forced);
    void log_price(const Market& m, std::int64_t now_ms);
    void add_account(Account account, std::int64_t now_ms);
    // Commands carry the caller's clock; it is never allowed to run backwards,
    // so logged timestamps equal the times the engine acted on.
    std::int64_t advance(std::int64_t now_ms);

    std::string session_;
    EngineConfig config_;
    std::shared_ptr<EventLog> log_;
    std::map<std::string, Market> markets_;
    std::map<std::string, Account> accounts_;
    std::map<std::string, Quote> quotes_;
    std::map<std::uint64_t, std::string> open_quotes_;  // by issue order
    std::map<std::pair<std::string, std::string>, std::string> open_by_trader_market_;
    std::uint64_t next_quote_ = 1;
    std::int64_t now_ = std::numeric_limits<std::int64_t>::min();
    Phase phase_ = Phase::Live;
    std::optional<SettlementReport> settlement_;
};

}  // namespace predmm::engine
