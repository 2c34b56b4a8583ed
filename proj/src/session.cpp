#include "predmm/session.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "predmm/json.hpp"

namespace predmm::session {

namespace ek = event_kind;
using nlohmann::json;

namespace {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

PayoffMode payoff_from_string(const std::string& s) {
    if (s == "analytic") return PayoffMode::Analytic;
    if (s == "realized") return PayoffMode::Realized;
    throw ValidationError("unknown payoff mode: " + s);
}

Visibility visibility_from_string(const std::string& s) {
    if (s == "shared") return Visibility::Shared;
    if (s == "per_trader") return Visibility::PerTrader;
    if (s == "limited") return Visibility::Limited;
    throw ValidationError("unknown visibility: " + s);
}

bool valid_trader_id(const std::string& id) {
    if (id.empty() || id.size() > 64 || id == kSharedWalker) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == '@';
    });
}

json walk_params(const walk::WalkConfig& c) {
    json j = c;
    j.erase("shocks");
    return j;
}

json hits_hit(const walk::EdgeHits& before, const walk::EdgeHits& after) {
    json hit = json::array();
    if (after.left != before.left) hit.push_back("left");
    if (after.right != before.right) hit.push_back("right");
    if (after.top != before.top) hit.push_back("top");
    if (after.bottom != before.bottom) hit.push_back("bottom");
    return hit;
}

}  // namespace

std::string to_string(PayoffMode m) { return m == PayoffMode::Analytic ? "analytic" : "realized"; }

std::string to_string(Visibility v) {
    switch (v) {
        case Visibility::Shared: return "shared";
        case Visibility::PerTrader: return "per_trader";
        case Visibility::Limited: return "limited";
    }
    return "shared";
}

std::string to_string(Phase p) {
    switch (p) {
        case Phase::Pending: return "pending";
        case Phase::Live: return "live";
        case Phase::Closed: return "closed";
        case Phase::Settled: return "settled";
    }
    return "pending";
}

void SessionConfig::validate() const {
    if (id.empty()) throw ValidationError("session id is required");
    if (duration_ms <= 0) throw ValidationError("duration must be positive");
    if (quote_ttl_ms <= 0) throw ValidationError("quote ttl must be positive");
    if (markets.size() != 2 || !markets.count(kLR) || !markets.count(kTB))
        throw ValidationError("a session has exactly the markets LR and TB");
    if (!(endowment.cash >= 0) || !(endowment.shares >= 0)) throw ValidationError("endowments must be non-negative");
    if (visibility == Visibility::Limited && view_limit_ms <= 0) throw ValidationError("view limit must be positive");
    if (payoff == PayoffMode::Realized && visibility != Visibility::Shared)
        throw ValidationError("realized payoffs need one shared walk");
    try {
        walk.validate();
        for (const auto& [id, mm] : markets)
            std::visit([](const auto& s) { s.validate(); }, mm);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }
    for (const auto& s : walk.shocks)
        if (s.at_ms >= duration_ms) throw ValidationError("shock scheduled after the session ends");
}

json SessionConfig::to_json() const {
    json mm = json::object();
    for (const auto& [id, m] : markets) mm[id] = market_maker_to_json(m);
    return {{"id", id},
            {"duration_ms", duration_ms},
            {"markets", mm},
            {"walk", walk},
            {"endowment",
             {{"cash", endowment.cash}, {"shares", endowment.shares}, {"short_allowed", endowment.short_allowed}}},
            {"payoff", session::to_string(payoff)},
            {"visibility", session::to_string(visibility)},
            {"view_limit_ms", view_limit_ms},
            {"quote_ttl_ms", quote_ttl_ms},
            {"seed", seed}};
}

SessionConfig SessionConfig::from_json(const json& j) {
    SessionConfig c;
    try {
        if (!j.is_object()) throw ValidationError("session config must be an object");
        c.id = j.value("id", std::string());
        c.duration_ms = j.value("duration_ms", c.duration_ms);
        if (j.contains("markets")) {
            for (const auto& [id, m] : j.at("markets").items()) c.markets[id] = market_maker_from_json(m);
        }
        if (j.contains("walk")) c.walk = j.at("walk").get<walk::WalkConfig>();
        if (j.contains("endowment")) {
            const auto& e = j.at("endowment");
            c.endowment.cash = e.value("cash", c.endowment.cash);
            c.endowment.shares = e.value("shares", c.endowment.shares);
            c.endowment.short_allowed = e.value("short_allowed", c.endowment.short_allowed);
        }
        c.payoff = payoff_from_string(j.value("payoff", std::string("analytic")));
        c.visibility = visibility_from_string(j.value("visibility", std::string("shared")));
        c.view_limit_ms = j.value("view_limit_ms", c.view_limit_ms);
        c.quote_ttl_ms = j.value("quote_ttl_ms", c.quote_ttl_ms);
        c.seed = j.value("seed", c.seed);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }
    return c;
}

std::uint64_t walker_seed(std::uint64_t session_seed, const std::string& walker_id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : walker_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(session_seed ^ splitmix64(h));
}

std::int64_t Walker::next_step_ms(std::int64_t interval_ms) const {
    std::int64_t t = origin_ms + static_cast<std::int64_t>(state.elapsed_steps + 1) * interval_ms;
    if (stop_ms && t > *stop_ms) return kNever;
    return t;
}

Session::Session(SessionConfig config, std::int64_t now_ms, std::shared_ptr<EventLog> log)
    : config_(std::move(config)),
      walk_config_(config_.walk),
      engine_(config_.id, engine::EngineConfig{config_.quote_ttl_ms, {}}, std::move(log)) {
    config_.validate();
    now_ms = advance(now_ms);
    engine_.record(now_ms, ek::kSessionCreated, {{"schema", kSchema}, {"config", config_.to_json()}});
    for (const char* m : {kLR, kTB}) engine_.open_market(m, config_.markets.at(m), now_ms);
}

std::int64_t Session::advance(std::int64_t now_ms) {
    now_ = std::max(now_, now_ms);
    return now_;
}

std::optional<std::int64_t> Session::ends_at() const {
    if (!started_at_) return std::nullopt;
    return *started_at_ + config_.duration_ms;
}

void Session::join(const std::string& trader, std::int64_t now_ms) {
    now_ms = advance(now_ms);
    tick(now_ms);
    if (!valid_trader_id(trader)) throw ValidationError("invalid trader id: '" + trader + "'");
    if (phase_ == Phase::Closed || phase_ == Phase::Settled)
        throw engine::SessionClosed("session " + config_.id + " has ended");
    if (has_trader(trader)) throw DuplicateId("trader already joined: " + trader);
    engine_.register_trader(trader, config_.endowment, now_ms);
    if (phase_ == Phase::Live && config_.visibility != Visibility::Shared) add_walker(trader, now_ms);
}

void Session::start(std::int64_t now_ms) {
    now_ms = advance(now_ms);
    if (phase_ != Phase::Pending) throw AlreadyStarted("session " + config_.id + " already started");
    started_at_ = now_ms;

    walk::WalkRng rng(splitmix64(config_.seed ^ 0x5e55e55e5ULL));
    for (const auto& s : config_.walk.shocks) {
        double fire = rng.uniform();
        double when = rng.uniform();
        if (s.probability < 1.0 && fire >= s.probability) continue;
        std::int64_t offset = s.at_ms;
        if (s.latest_ms) offset += static_cast<std::int64_t>(std::floor(when * static_cast<double>(*s.latest_ms - s.at_ms + 1)));
        shocks_.push_back({now_ms + offset, s.change});
    }
    std::stable_sort(shocks_.begin(), shocks_.end(),
                     [](const ResolvedShock& a, const ResolvedShock& b) { return a.at_ms < b.at_ms; });

    json scheduled = json::array();
    for (const auto& s : shocks_) scheduled.push_back({{"at_ms", s.at_ms}, {"change", s.change}});
    engine_.record(now_ms, ek::kSessionStarted,
                   {{"started_at", now_ms},
                    {"duration_ms", config_.duration_ms},
                    {"ends_at", *ends_at()},
                    {"visibility", session::to_string(config_.visibility)},
                    {"walk", walk_params(walk_config_)},
                    {"shocks", scheduled}});
    phase_ = Phase::Live;

    if (config_.visibility == Visibility::Shared) {
        add_walker(kSharedWalker, now_ms);
    } else {
        for (const auto& [trader, account] : engine_.accounts()) add_walker(trader, now_ms);
    }
}

void Session::add_walker(const std::string& id, std::int64_t origin_ms) {
    Walker w;
    w.id = id;
    w.seed = walker_seed(config_.seed, id);
    w.rng = std::make_unique<walk::WalkRng>(w.seed);
    w.state = walk::WalkState::start(walk_config_);
    w.origin_ms = origin_ms;
    w.stop_ms = ends_at();
    if (config_.visibility == Visibility::Limited) w.stop_ms = std::min(*w.stop_ms, origin_ms + config_.view_limit_ms);
    walkers_.emplace(id, std::move(w));
}

void Session::step_walker(Walker& w) {
    std::int64_t t = w.next_step_ms(walk_config_.step_interval_ms);
    auto before = w.state.hits;
    w.state = walk::step(w.state, walk_config_, *w.rng);
    json payload = {{"walker", w.id}, {"x", w.state.x}, {"y", w.state.y}, {"hits", w.state.hits},
                    {"step", w.state.elapsed_steps}};
    auto hit = hits_hit(before, w.state.hits);
    if (!hit.empty()) payload["hit"] = hit;
    engine_.record(t, ek::kWalkStep, std::move(payload));
}

void Session::apply_change(const walk::ShockChange& change, std::int64_t at_ms, const char* source) {
    walk_config_ = walk::apply_shock(walk_config_, change);
    for (auto& [id, w] : walkers_) w.state = walk::reconcile_position(w.state, walk_config_);
    engine_.record(at_ms, ek::kShock, {{"change", change}, {"source", source}, {"walk", walk_params(walk_config_)}});
}

void Session::tick(std::int64_t now_ms) {
    now_ms = advance(now_ms);
    if (phase_ != Phase::Live) return;
    const std::int64_t end = *ends_at();
    for (;;) {
        // earliest scheduled item; ties go steps, shocks, expiries, end
        std::int64_t best = kNever;
        int what = -1;
        Walker* walker = nullptr;
        for (auto& [id, w] : walkers_) {
            std::int64_t t = w.next_step_ms(walk_config_.step_interval_ms);
            if (t < best) {
                best = t;
                what = 0;
                walker = &w;
            }
        }
        if (next_shock_ < shocks_.size() && shocks_[next_shock_].at_ms < best) {
            best = shocks_[next_shock_].at_ms;
            what = 1;
        }
        if (auto e = engine_.next_expiry(); e && *e < best) {
            best = *e;
            what = 2;
        }
        if (end < best) {
            best = end;
            what = 3;
        }
        if (best > now_ms) return;
        switch (what) {
            case 0: step_walker(*walker); break;
            case 1:
                apply_change(shocks_[next_shock_].change, best, "scheduled");
                ++next_shock_;
                break;
            case 2: engine_.expire_due(best); break;
            default:
                engine_.close(best);
                phase_ = Phase::Closed;
                return;
        }
    }
}

void Session::require_live(std::int64_t now_ms) {
    tick(now_ms);
    if (phase_ == Phase::Pending) throw NotStarted("session " + config_.id + " has not started");
    if (phase_ != Phase::Live) throw engine::SessionClosed("session " + config_.id + " has ended");
}

engine::Quote Session::request_quote(const std::string& market, const std::string& trader, Side side,
                                     std::int64_t qty, std::int64_t now_ms) {
    now_ms = advance(now_ms);
    require_live(now_ms);
    return engine_.request_quote(market, trader, side, qty, now_ms);
}

engine::ConfirmRecord Session::confirm(const std::string& quote_id, const std::string& trader, bool accept,
                                       std::int64_t now_ms) {
    now_ms = advance(now_ms);
    tick(now_ms);
    if (engine_.quote(quote_id).trader != trader) throw engine::UnknownQuote("unknown quote " + quote_id);
    return engine_.confirm_quote(quote_id, accept, now_ms);
}

void Session::shock(const walk::ShockChange& change, std::int64_t now_ms) {
    now_ms = advance(now_ms);
    require_live(now_ms);
    try {
        walk::apply_shock(walk_config_, change);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    apply_change(change, now_ms, "operator");
}

std::map<std::string, double> Session::settlement_values() const {
    double v_lr = walk::lr_value(walk_config_);
    double v_tb = walk::tb_value(walk_config_);
    if (config_.payoff == PayoffMode::Realized) {
        // an axis that never reached an edge falls back to its analytic value
        const auto& h = walkers_.at(kSharedWalker).state.hits;
        if (h.left + h.right > 0) v_lr = static_cast<double>(h.right) / static_cast<double>(h.left + h.right);
        if (h.top + h.bottom > 0) v_tb = static_cast<double>(h.bottom) / static_cast<double>(h.top + h.bottom);
    }
    return {{kLR, 100.0 * v_lr}, {kTB, 100.0 * v_tb}};
}

engine::SettlementReport Session::end(std::int64_t now_ms) {
    now_ms = advance(now_ms);
    tick(now_ms);
    if (phase_ == Phase::Pending) throw NotStarted("session " + config_.id + " has not started");
    if (phase_ == Phase::Live) throw NotEnded("session " + config_.id + " is still trading");
    if (phase_ == Phase::Settled) throw engine::SessionClosed("session " + config_.id + " already settled");
    auto report = engine_.settle(settlement_values(), now_ms);
    phase_ = Phase::Settled;
    return report;
}

const Walker* Session::walker_for(const std::optional<std::string>& trader) const {
    if (config_.visibility == Visibility::Shared) {
        auto it = walkers_.find(kSharedWalker);
        return it == walkers_.end() ? nullptr : &it->second;
    }
    if (!trader) return nullptr;
    auto it = walkers_.find(*trader);
    return it == walkers_.end() ? nullptr : &it->second;
}

json Session::snapshot(const std::optional<std::string>& trader, std::int64_t now_ms) const {
    json markets = json::object();
    for (const auto& [id, m] : engine_.markets()) markets[id] = {{"spot", m.spot()}};
    json j = {{"schema", kSchema},
              {"session", config_.id},
              {"phase", session::to_string(phase_)},
              {"markets", markets},
              {"time_remaining_ms", nullptr},
              {"walk", nullptr},
              {"hits", nullptr}};
    if (started_at_) {
        j["started_at"] = *started_at_;
        j["ends_at"] = *ends_at();
        j["time_remaining_ms"] = std::max<std::int64_t>(0, *ends_at() - now_ms);
    } else {
        j["duration_ms"] = config_.duration_ms;
    }
    const Walker* w = walker_for(trader);
    bool viewing = w && !(config_.visibility == Visibility::Limited && w->stop_ms && now_ms > *w->stop_ms);
    if (viewing) {
        j["walk"] = {{"S", walk_config_.half_width}, {"x", w->state.x}, {"y", w->state.y},
                     {"step", w->state.elapsed_steps}};
        j["hits"] = w->state.hits;
    }
    if (trader && has_trader(*trader)) {
        const auto& a = engine_.account(*trader);
        j["portfolio"] = {{"cash", a.cash}, {"positions", a.positions}};
        json open = json::array();
        for (const char* m : {kLR, kTB})
            if (auto id = engine_.open_quote_of(*trader, m)) {
                json q = engine_.quote(*id).to_json();
                open.push_back(q);
            }
        j["open_quotes"] = open;
    }
    if (const auto& report = engine_.settlement()) {
        json board = report->to_json();
        j["settlement"] = {{"values", board["values"]}, {"leaderboard", board["leaderboard"]}};
    }
    return j;
}

std::optional<json> Session::visible(const TradeEvent& e, const std::optional<std::string>& trader,
                                     std::int64_t ends_at_ms) {
    const auto& p = e.payload;
    json payload;
    auto own = [&] { return trader && p.value("trader", std::string()) == *trader; };

    if (e.kind == ek::kPrice || e.kind == ek::kSessionEnded) {
        payload = p;
    } else if (e.kind == ek::kWalkStep) {
        const auto walker = p.at("walker").get<std::string>();
        if (walker != kSharedWalker && !(trader && walker == *trader)) return std::nullopt;
        payload = p;
    } else if (e.kind == ek::kQuoteRequested || e.kind == ek::kQuoted || e.kind == ek::kAccepted ||
               e.kind == ek::kCanceled || e.kind == ek::kExpired || e.kind == ek::kTraderJoined) {
        if (!own()) return std::nullopt;
        payload = p;
    } else if (e.kind == ek::kSessionStarted) {
        // the shock schedule and walk parameters stay with the operator
        payload = {{"started_at", p.at("started_at")}, {"duration_ms", p.at("duration_ms")},
                   {"ends_at", p.at("ends_at")}};
        ends_at_ms = p.at("ends_at").get<std::int64_t>();
    } else if (e.kind == ek::kSettlement) {
        payload = {{"values", p.at("values")}, {"leaderboard", p.at("leaderboard")}};
    } else {
        return std::nullopt;
    }
    json msg = {{"schema", kSchema}, {"seq", e.seq}, {"ts_ms", e.ts_ms}, {"kind", e.kind}, {"payload", payload}};
    if (ends_at_ms > 0) msg["time_remaining_ms"] = std::max<std::int64_t>(0, ends_at_ms - e.ts_ms);
    return msg;
}

std::unique_ptr<Session> Session::restore(const std::vector<TradeEvent>& events, std::shared_ptr<EventLog> log,
                                          bool allow_tail) {
    if (events.empty() || events.front().kind != ek::kSessionCreated)
        throw MalformedLog(1, "a session log starts with session_created");
    std::unique_ptr<Session> s;
    try {
        s = std::make_unique<Session>(SessionConfig::from_json(events.front().payload.at("config")),
                                      events.front().ts_ms, std::move(log));
    } catch (const std::exception& e) {
        throw MalformedLog(1, e.what());
    }

    auto str = [](const json& p, const char* key) { return p.at(key).get<std::string>(); };
    for (std::size_t i = 1; i < events.size(); ++i) {
        const auto& e = events[i];
        const auto& p = e.payload;
        const std::int64_t t = e.ts_ms;
        try {
            if (e.kind == ek::kTraderJoined) {
                s->join(str(p, "trader"), t);
            } else if (e.kind == ek::kSessionStarted) {
                s->start(t);
            } else if (e.kind == ek::kQuoteRequested) {
                s->request_quote(str(p, "market"), str(p, "trader"), side_from_string(str(p, "side")),
                                 p.at("qty").get<std::int64_t>(), t);
            } else if (e.kind == ek::kAccepted) {
                s->confirm(str(p, "quote_id"), str(p, "trader"), true, t);
            } else if (e.kind == ek::kCanceled) {
                auto reason = p.value("reason", std::string("trader"));
                if (reason == "trader") {
                    s->confirm(str(p, "quote_id"), str(p, "trader"), false, t);
                } else if (reason == "insufficient_funds" || reason == "insufficient_shares") {
                    try {
                        s->confirm(str(p, "quote_id"), str(p, "trader"), true, t);
                    } catch (const engine::InsufficientFunds&) {
                    } catch (const engine::InsufficientShares&) {
                    }
                }
            } else if (e.kind == ek::kShock) {
                if (str(p, "source") == "operator") s->shock(p.at("change").get<walk::ShockChange>(), t);
            } else if (e.kind == ek::kSettlement) {
                s->end(t);
            }
            // everything else is regenerated by the calls above or by tick
        } catch (const engine::ReplayMismatch&) {
            throw;
        } catch (const std::exception& ex) {
            throw engine::ReplayMismatch("replay of seq " + std::to_string(e.seq) + " (" + e.kind +
                                         ") failed: " + ex.what());
        }
    }
    s->tick(events.back().ts_ms);

    const auto& replayed = s->log().events();
    if (replayed.size() < events.size() || (!allow_tail && replayed.size() != events.size()))
        throw engine::ReplayMismatch("replay produced " + std::to_string(replayed.size()) + " events, log has " +
                                     std::to_string(events.size()));
    for (std::size_t i = 0; i < events.size(); ++i)
        if (!(replayed[i] == events[i]))
            throw engine::ReplayMismatch("replay diverges at seq " + std::to_string(events[i].seq) + ": expected " +
                                         to_line(events[i]) + " got " + to_line(replayed[i]));
    return s;
}

}  // namespace predmm::session
