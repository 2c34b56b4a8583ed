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

#include "predmm/engine.hpp"
#include "predmm/walk.hpp"

namespace predmm::session {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DuplicateId : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct AlreadyStarted : std::logic_error {
    using std::logic_error::logic_error;
};
struct NotStarted : std::logic_error {
    using std::logic_error::logic_error;
};
struct NotEnded : std::logic_error {
    using std::logic_error::logic_error;
};

enum class PayoffMode { Analytic, Realized };
/// Shared: every trader watches one walk. PerTrader: each trader watches an
/// independent realization. Limited: per-trader walks visible only for
/// `view_limit_ms` after the trader's walk starts.
enum class Visibility { Shared, PerTrader, Limited };
enum class Phase { Pending, Live, Closed, Settled };

std::string to_string(PayoffMode m);
std::string to_string(Visibility v);
std::string to_string(Phase p);

inline constexpr const char* kLR = "LR";
inline constexpr const char* kTB = "TB";
inline constexpr int kSchema = 1;

struct SessionConfig {
    std::string id;
    std::int64_t duration_ms = 600000;
    std::map<std::string, MarketMakerState> markets;  // exactly LR and TB
    walk::WalkConfig walk;
    engine::Endowment endowment;
    PayoffMode payoff = PayoffMode::Analytic;
    Visibility visibility = Visibility::Shared;
    std::int64_t view_limit_ms = 120000;
    std::int64_t quote_ttl_ms = 10000;
    std::uint64_t seed = 1;

    void validate() const;
    nlohmann::json to_json() const;
    static SessionConfig from_json(const nlohmann::json& j);
};

/// A walk realization and the clock it steps on.
struct Walker {
    std::string id;  // "shared" or the trader id
    walk::WalkState state;
    std::uint64_t seed = 0;
    std::int64_t origin_ms = 0;
    std::optional<std::int64_t> stop_ms;  // last instant a step may happen
    std::unique_ptr<walk::WalkRng> rng;

    std::int64_t next_step_ms(std::int64_t interval_ms) const;
};

struct ResolvedShock {
    std::int64_t at_ms;  // absolute
    walk::ShockChange change;
};

inline constexpr const char* kSharedWalker = "shared";

/// Seed of a trader's private walk: a fixed mix of the session seed and the
/// trader id, so the same session replays the same realizations.
std::uint64_t walker_seed(std::uint64_t session_seed, const std::string& walker_id);

/// One live trading session: two markets priced by the engine, the random
/// walk(s) that drive their true values, and the schedule of timed work
/// (walk steps, shocks, quote expiry, end of trading).
///
/// Every method takes the caller's clock. Timed work is executed in schedule
/// order at its scheduled time, whoever triggers it, so a log replayed by
/// calling the same commands at their logged times regenerates every record.
class Session {
public:
    Session(SessionConfig config, std::int64_t now_ms, std::shared_ptr<EventLog> log = nullptr);

    void join(const std::string& trader, std::int64_t now_ms);
    void start(std::int64_t now_ms);
    /// Runs everything scheduled at or before now.
    void tick(std::int64_t now_ms);

    engine::Quote request_quote(const std::string& market, const std::string& trader, Side side, std::int64_t qty,
                                std::int64_t now_ms);
    engine::ConfirmRecord confirm(const std::string& quote_id, const std::string& trader, bool accept,
                                  std::int64_t now_ms);
    /// Ad-hoc parameter change from the operator.
    void shock(const walk::ShockChange& change, std::int64_t now_ms);
    /// Settles at 100 times the walk value of each market.
    engine::SettlementReport end(std::int64_t now_ms);

    /// What a trader (or a spectator, when empty) may see right now.
    nlohmann::json snapshot(const std::optional<std::string>& trader, std::int64_t now_ms) const;

    /// The stream message for `event` as seen by `trader`, or nothing when the
    /// record is hidden from them.
    static std::optional<nlohmann::json> visible(const TradeEvent& event, const std::optional<std::string>& trader,
                                                 std::int64_t ends_at_ms);

    /// Rebuilds a session by re-executing the commands in `events` at their
    /// logged times and checks that the regenerated log is identical. With
    /// `allow_tail`, timed work that was due but not yet written when the
    /// log stopped may follow the recorded events.
    static std::unique_ptr<Session> restore(const std::vector<TradeEvent>& events,
                                            std::shared_ptr<EventLog> log = nullptr, bool allow_tail = false);

    const SessionConfig& config() const { return config_; }
    const walk::WalkConfig& walk_config() const { return walk_config_; }
    Phase phase() const { return phase_; }
    std::optional<std::int64_t> started_at() const { return started_at_; }
    std::optional<std::int64_t> ends_at() const;
    const engine::Engine& engine() const { return engine_; }
    EventLog& log() { return engine_.log(); }
    const EventLog& log() const { return engine_.log(); }
    const std::map<std::string, Walker>& walkers() const { return walkers_; }
    const std::vector<ResolvedShock>& scheduled_shocks() const { return shocks_; }
    bool has_trader(const std::string& trader) const { return engine_.accounts().count(trader) > 0; }
    /// Walker whose position `trader` sees, if any.
    const Walker* walker_for(const std::optional<std::string>& trader) const;

private:
    void require_live(std::int64_t now_ms);
    void add_walker(const std::string& id, std::int64_t origin_ms);
    void step_walker(Walker& w);
    void apply_change(const walk::ShockChange& change, std::int64_t at_ms, const char* source);
    std::map<std::string, double> settlement_values() const;
    std::int64_t advance(std::int64_t now_ms);

    SessionConfig config_;
    walk::WalkConfig walk_config_;  // current parameters, after shocks
    engine::Engine engine_;
    Phase phase_ = Phase::Pending;
    std::optional<std::int64_t> started_at_;
    std::map<std::string, Walker> walkers_;
    std::vector<ResolvedShock> shocks_;
    std::size_t next_shock_ = 0;
    std::int64_t now_ = std::numeric_limits<std::int64_t>::min();
};

}  // namespace predmm::session
