#include "predmm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "predmm/json.hpp"

namespace predmm::engine {

namespace ek = event_kind;
using nlohmann::json;

std::string to_string(QuoteState s) {
    switch (s) {
        case QuoteState::Open: return "open";
        case QuoteState::Accepted: return "accepted";
        case QuoteState::Canceled: return "canceled";
        case QuoteState::Expired: return "expired";
    }
    return "unknown";
}

json Quote::to_json() const {
    return {{"quote_id", id},           {"market", market},
            {"trader", trader},         {"side", predmm::to_string(side)},
            {"qty", qty},               {"vwap", vwap},
            {"spot", spot_at_quote},    {"issued_at", issued_at},
            {"expires_at", expires_at}, {"state", engine::to_string(state)}};
}

json Account::to_json() const {
    return {{"trader", trader},
            {"cash", cash},
            {"positions", positions},
            {"short_allowed", short_allowed},
            {"initial_cash", initial_cash},
            {"initial_positions", initial_positions}};
}

json ConfirmRecord::to_json() const {
    return {{"quote_id", quote_id},         {"market", market},  {"trader", trader},
            {"side", predmm::to_string(side)}, {"filled", filled}, {"qty", qty},
            {"price", price},               {"cash_delta", cash_delta},
            {"position_delta", position_delta}, {"spot_after", spot_after}};
}

json SettlementReport::to_json() const {
    json board = json::array();
    for (const auto& r : leaderboard)
        board.push_back({{"trader", r.trader}, {"pnl", r.pnl}, {"final_wealth", r.final_wealth}});
    return {{"values", values}, {"mm_profit", mm_profit}, {"trader_pnl", trader_pnl}, {"leaderboard", board}};
}

SettlementReport SettlementReport::from_json(const json& j) {
    SettlementReport r;
    r.values = j.at("values").get<std::map<std::string, double>>();
    r.mm_profit = j.at("mm_profit").get<std::map<std::string, double>>();
    r.trader_pnl = j.at("trader_pnl").get<std::map<std::string, double>>();
    for (const auto& row : j.at("leaderboard"))
        r.leaderboard.push_back({row.at("trader").get<std::string>(), row.at("pnl").get<double>(),
                                 row.at("final_wealth").get<double>()});
    return r;
}

Engine::Engine(std::string session, EngineConfig config, std::shared_ptr<EventLog> log)
    : session_(std::move(session)), config_(config), log_(std::move(log)) {
    if (!log_) log_ = std::make_shared<EventLog>(session_);
}

Market& Engine::market_mut(const std::string& id) {
    auto it = markets_.find(id);
    if (it == markets_.end()) throw UnknownMarket("unknown market " + id);
    return it->second;
}

const Market& Engine::market(const std::string& id) const {
    auto it = markets_.find(id);
    if (it == markets_.end()) throw UnknownMarket("unknown market " + id);
    return it->second;
}

Account& Engine::account_mut(const std::string& trader) {
    auto it = accounts_.find(trader);
    if (it == accounts_.end()) throw UnknownTrader("unknown trader " + trader);
    return it->second;
}

const Account& Engine::account(const std::string& trader) const {
    auto it = accounts_.find(trader);
    if (it == accounts_.end()) throw UnknownTrader("unknown trader " + trader);
    return it->second;
}

const Quote& Engine::quote(const std::string& id) const {
    auto it = quotes_.find(id);
    if (it == quotes_.end()) throw UnknownQuote("unknown quote " + id);
    return it->second;
}

std::optional<std::string> Engine::open_quote_of(const std::string& trader, const std::string& market) const {
    auto it = open_by_trader_market_.find({trader, market});
    if (it == open_by_trader_market_.end()) return std::nullopt;
    return it->second;
}

std::int64_t Engine::advance(std::int64_t now_ms) {
    now_ = std::max(now_, now_ms);
    return now_;
}

void Engine::log_price(const Market& m, std::int64_t now_ms) {
    log_->append(now_ms, ek::kPrice, {{"market", m.id}, {"spot", m.spot()}});
}

void Engine::open_market(const std::string& id, MarketMakerState mm, std::int64_t now_ms,
                         std::optional<PriceBand> band) {
    now_ms = advance(now_ms);
    if (markets_.count(id)) throw std::invalid_argument("market already open: " + id);
    Market m;
    m.id = id;
    m.mm = std::move(mm);
    m.band = band.value_or(config_.band);
    auto& stored = markets_.emplace(id, std::move(m)).first->second;
    log_->append(now_ms, ek::kMarketOpened,
                 {{"market", id},
                  {"mm", market_maker_to_json(stored.mm)},
                  {"band", {{"floor", stored.band.floor}, {"ceiling", stored.band.ceiling}}},
                  {"quote_ttl_ms", config_.quote_ttl_ms}});
    log_price(stored, now_ms);
}

void Engine::register_trader(const std::string& trader, const Endowment& endowment, std::int64_t now_ms) {
    now_ms = advance(now_ms);
    Account a;
    a.trader = trader;
    a.cash = a.initial_cash = endowment.cash;
    a.short_allowed = endowment.short_allowed;
    for (const auto& [id, m] : markets_) {
        a.positions[id] = endowment.shares;
        a.initial_positions[id] = endowment.shares;
        a.cash_flow[id] = 0.0;
    }
    add_account(std::move(a), now_ms);
}

void Engine::add_account(Account account, std::int64_t now_ms) {
    now_ms = advance(now_ms);
    if (accounts_.count(account.trader)) throw std::invalid_argument("trader already registered: " + account.trader);
    json payload = {{"trader", account.trader},
                    {"cash", account.initial_cash},
                    {"positions", account.initial_positions},
                    {"short_allowed", account.short_allowed}};
    accounts_.emplace(account.trader, std::move(account));
    log_->append(now_ms, ek::kTraderJoined, std::move(payload));
}

Quote Engine::request_quote(const std::string& market_id, const std::string& trader, Side side, std::int64_t qty,
                            std::int64_t now_ms) {
    if (phase_ != Phase::Live) throw SessionClosed("session " + session_ + " is not live");
    now_ms = advance(now_ms);
    expire_due(now_ms);
    if (qty < 1) throw InvalidQty("quantity must be a positive integer");
    Market& m = market_mut(market_id);
    account(trader);

    log_->append(now_ms, ek::kQuoteRequested,
                 {{"market", market_id}, {"trader", trader}, {"side", predmm::to_string(side)}, {"qty", qty}});

    if (auto previous = open_quote_of(trader, market_id)) {
        end_quote(quotes_.at(*previous), QuoteState::Canceled, ek::kCanceled, "superseded", now_ms, false);
    }

    Quote q;
    q.number = next_quote_++;
    q.id = session_ + ".q" + std::to_string(q.number);
    q.market = market_id;
    q.trader = trader;
    q.side = side;
    q.qty = qty;
    q.spot_at_quote = m.spot();
    q.vwap = predmm::quote(m.mm, side, static_cast<double>(qty), m.band);
    q.issued_at = now_ms;
    q.expires_at = now_ms + config_.quote_ttl_ms;

    json payload = q.to_json();
    payload.erase("state");
    log_->append(now_ms, ek::kQuoted, std::move(payload));

    open_quotes_.emplace(q.number, q.id);
    open_by_trader_market_[{trader, market_id}] = q.id;
    return quotes_.emplace(q.id, q).first->second;
}

void Engine::end_quote(Quote& q, QuoteState state, const char* kind, const std::string& reason, std::int64_t now_ms,
                       bool forced) {
    Market& m = market_mut(q.market);
    q.state = state;
    open_quotes_.erase(q.number);
    open_by_trader_market_.erase({q.trader, q.market});

    json payload = {{"quote_id", q.id}, {"market", q.market}, {"trader", q.trader}, {"side", predmm::to_string(q.side)},
                    {"qty", q.qty}};
    if (!reason.empty()) payload["reason"] = reason;
    if (forced) payload["forced"] = true;

    if (state == QuoteState::Accepted) {
        double notional = q.vwap * static_cast<double>(q.qty);
        double dir = sign(q.side);
        Account& a = account_mut(q.trader);
        a.cash -= dir * notional;
        a.cash_flow[q.market] -= dir * notional;
        a.positions[q.market] += dir * static_cast<double>(q.qty);
        m.mm_cash += dir * notional;
        m.mm_short += dir * static_cast<double>(q.qty);
        (q.side == Side::Buy ? m.buys : m.sells) += 1;
        payload["price"] = q.vwap;
    } else {
        ++m.cancels;
    }
    m.mm = commit(m.mm, q.side, static_cast<double>(q.qty), q.vwap, q.spot_at_quote, state == QuoteState::Accepted);
    log_->append(now_ms, kind, std::move(payload));
    log_price(m, now_ms);
}

ConfirmRecord Engine::confirm_quote(const std::string& quote_id, bool accept, std::int64_t now_ms) {
    auto it = quotes_.find(quote_id);
    if (it == quotes_.end()) throw UnknownQuote("unknown quote " + quote_id);
    now_ms = advance(now_ms);
    expire_due(now_ms);
    Quote& q = it->second;
    if (q.state == QuoteState::Expired) throw QuoteExpired("quote " + quote_id + " expired");
    if (q.state != QuoteState::Open) throw QuoteNotOpen("quote " + quote_id + " is " + to_string(q.state));

    ConfirmRecord rec;
    rec.quote_id = q.id;
    rec.market = q.market;
    rec.trader = q.trader;
    rec.side = q.side;
    rec.qty = q.qty;
    rec.price = q.vwap;

    if (accept) {
        const Account& a = account(q.trader);
        double notional = q.vwap * static_cast<double>(q.qty);
        if (!a.short_allowed) {
            if (q.side == Side::Buy && a.cash < notional) {
                end_quote(q, QuoteState::Canceled, ek::kCanceled, "insufficient_funds", now_ms, false);
                throw InsufficientFunds("insufficient cash for quote " + quote_id);
            }
            if (q.side == Side::Sell && a.positions.at(q.market) < static_cast<double>(q.qty)) {
                end_quote(q, QuoteState::Canceled, ek::kCanceled, "insufficient_shares", now_ms, false);
                throw InsufficientShares("insufficient shares for quote " + quote_id);
            }
        }
        end_quote(q, QuoteState::Accepted, ek::kAccepted, "", now_ms, false);
        rec.filled = true;
        rec.cash_delta = -sign(q.side) * notional;
        rec.position_delta = sign(q.side) * static_cast<double>(q.qty);
    } else {
        end_quote(q, QuoteState::Canceled, ek::kCanceled, "trader", now_ms, false);
    }
    rec.spot_after = market(q.market).spot();
    return rec;
}

std::size_t Engine::expire_due(std::int64_t now_ms) {
    now_ms = advance(now_ms);
    std::vector<std::string> due;
    for (const auto& [number, id] : open_quotes_)
        if (quotes_.at(id).expires_at <= now_ms) due.push_back(id);
    for (const auto& id : due) end_quote(quotes_.at(id), QuoteState::Expired, ek::kExpired, "", now_ms, false);
    return due.size();
}

std::optional<std::int64_t> Engine::next_expiry() const {
    std::optional<std::int64_t> best;
    for (const auto& [number, id] : open_quotes_) {
        auto t = quotes_.at(id).expires_at;
        if (!best || t < *best) best = t;
    }
    return best;
}

void Engine::close(std::int64_t now_ms) {
    if (phase_ != Phase::Live) return;
    now_ms = advance(now_ms);
    expire_due(now_ms);
    std::vector<std::string> open;
    for (const auto& [number, id] : open_quotes_) open.push_back(id);
    for (const auto& id : open) end_quote(quotes_.at(id), QuoteState::Expired, ek::kExpired, "", now_ms, true);
    phase_ = Phase::Closed;
    log_->append(now_ms, ek::kSessionEnded, json::object());
}

SettlementReport Engine::settle(const std::map<std::string, double>& values, std::int64_t now_ms) {
    if (phase_ == Phase::Settled) throw SessionClosed("session " + session_ + " already settled");
    now_ms = advance(now_ms);
    if (phase_ == Phase::Live) close(now_ms);

    SettlementReport report;
    for (const auto& [id, m] : markets_) {
        auto it = values.find(id);
        if (it == values.end()) throw std::invalid_argument("no settlement value for market " + id);
        double v = it->second;
        report.values[id] = v;
        report.mm_profit[id] = m.mm_cash - m.mm_short * v;
        report.trader_pnl[id] = 0.0;
    }
    for (const auto& [trader, a] : accounts_) {
        TraderResult r{trader, 0.0, a.cash};
        for (const auto& [id, v] : report.values) {
            double pos = a.positions.count(id) ? a.positions.at(id) : 0.0;
            double init = a.initial_positions.count(id) ? a.initial_positions.at(id) : 0.0;
            double flow = a.cash_flow.count(id) ? a.cash_flow.at(id) : 0.0;
            double pnl = flow + (pos - init) * v;
            report.trader_pnl[id] += pnl;
            r.pnl += pnl;
            r.final_wealth += pos * v;
        }
        report.leaderboard.push_back(r);
    }
    std::stable_sort(report.leaderboard.begin(), report.leaderboard.end(),
                     [](const TraderResult& a, const TraderResult& b) { return a.final_wealth > b.final_wealth; });
    phase_ = Phase::Settled;
    settlement_ = report;
    log_->append(now_ms, ek::kSettlement, report.to_json());
    return report;
}

void Engine::apply(const TradeEvent& e) {
    const auto& p = e.payload;
    const std::string& kind = e.kind;
    if (kind == ek::kMarketOpened) {
        PriceBand band{p.at("band").at("floor").get<double>(), p.at("band").at("ceiling").get<double>()};
        config_.quote_ttl_ms = p.value("quote_ttl_ms", config_.quote_ttl_ms);
        open_market(p.at("market").get<std::string>(), market_maker_from_json(p.at("mm")), e.ts_ms, band);
    } else if (kind == ek::kTraderJoined) {
        Account a;
        a.trader = p.at("trader").get<std::string>();
        a.cash = a.initial_cash = p.at("cash").get<double>();
        a.positions = a.initial_positions = p.at("positions").get<std::map<std::string, double>>();
        for (const auto& [id, pos] : a.positions) a.cash_flow[id] = 0.0;
        a.short_allowed = p.at("short_allowed").get<bool>();
        add_account(std::move(a), e.ts_ms);
    } else if (kind == ek::kQuoteRequested) {
        try {
            request_quote(p.at("market").get<std::string>(), p.at("trader").get<std::string>(),
                          side_from_string(p.at("side").get<std::string>()), p.at("qty").get<std::int64_t>(), e.ts_ms);
        } catch (const InvalidQty&) {
        }
    } else if (kind == ek::kAccepted) {
        confirm_quote(p.at("quote_id").get<std::string>(), true, e.ts_ms);
    } else if (kind == ek::kCanceled) {
        auto reason = p.value("reason", std::string("trader"));
        auto id = p.at("quote_id").get<std::string>();
        if (reason == "trader") {
            confirm_quote(id, false, e.ts_ms);
        } else if (reason == "insufficient_funds" || reason == "insufficient_shares") {
            try {
                confirm_quote(id, true, e.ts_ms);
            } catch (const InsufficientFunds&) {
            } catch (const InsufficientShares&) {
            }
        }
    } else if (kind == ek::kExpired) {
        if (!p.value("forced", false)) expire_due(e.ts_ms);
    } else if (kind == ek::kSessionEnded) {
        close(e.ts_ms);
    } else if (kind == ek::kSettlement) {
        settle(p.at("values").get<std::map<std::string, double>>(), e.ts_ms);
    } else if (kind == ek::kQuoted || kind == ek::kPrice) {
        // derived
    } else {
        record(e.ts_ms, kind, p);
    }
}

const TradeEvent& Engine::record(std::int64_t now_ms, const std::string& kind, nlohmann::json payload) {
    return log_->append(advance(now_ms), kind, std::move(payload));
}

Engine Engine::replay(const std::vector<TradeEvent>& events, bool verify) {
    Engine engine(events.empty() ? std::string() : events.front().session);
    for (const auto& e : events) engine.apply(e);
    if (verify) {
        const auto& replayed = engine.log().events();
        std::size_t n = std::min(replayed.size(), events.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!(replayed[i] == events[i]))
                throw ReplayMismatch("replay diverges at seq " + std::to_string(events[i].seq) + ": expected " +
                                     to_line(events[i]) + " got " + to_line(replayed[i]));
        }
        if (replayed.size() != events.size())
            throw ReplayMismatch("replay produced " + std::to_string(replayed.size()) + " events, log has " +
                                 std::to_string(events.size()));
    }
    return engine;
}

}  // namespace predmm::engine
