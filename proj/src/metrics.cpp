#include "predmm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "predmm/engine.hpp"

namespace predmm::metrics {

namespace ek = event_kind;

double truth_at(const TruthSeries& truth, std::int64_t ts_ms) {
    if (truth.empty()) throw std::invalid_argument("truth series is empty");
    auto it = std::upper_bound(truth.begin(), truth.end(), ts_ms,
                               [](std::int64_t t, const TruthPoint& p) { return t < p.ts_ms; });
    if (it == truth.begin()) return truth.front().value;
    return std::prev(it)->value;
}

nlohmann::json RunMetrics::to_json() const {
    return {{"mm_profit", mm_profit}, {"mm_max_loss", mm_max_loss}, {"avg_spread", avg_spread},
            {"rmsd", rmsd},           {"rmsd_eq", rmsd_eq},         {"buys", buys},
            {"sells", sells},         {"cancels", cancels},         {"samples", samples}};
}

void MetricsAccumulator::on_fill(const MarketMakerState& mm, const PriceBand& band) {
    double s = probe_spread(mm, config_.probe_qty, band);
    spread_sum_ += config_.half_spread ? 0.5 * s : s;
    ++spread_count_;
}

void MetricsAccumulator::on_sample(std::int64_t ts_ms, double spot, double truth) {
    samples_.push_back({ts_ms, spot - truth});
}

RunMetrics MetricsAccumulator::finish(const TruthSeries& truth, double mm_profit, std::int64_t buys,
                                      std::int64_t sells, std::int64_t cancels) const {
    RunMetrics r;
    r.mm_profit = mm_profit;
    r.mm_max_loss = std::max(0.0, -mm_profit);
    r.avg_spread = spread_count_ ? spread_sum_ / static_cast<double>(spread_count_) : 0.0;
    r.buys = buys;
    r.sells = sells;
    r.cancels = cancels;
    r.samples = static_cast<std::int64_t>(samples_.size());
    if (samples_.empty()) return r;

    double sq = 0.0;
    for (const auto& s : samples_) sq += s.error * s.error;
    r.rmsd = std::sqrt(sq / static_cast<double>(samples_.size()));

    // equilibrium window: from halfway between the last truth change and the end
    std::int64_t first = samples_.front().ts_ms;
    std::int64_t end = samples_.back().ts_ms;
    std::int64_t last_change = first;
    for (std::size_t i = 1; i < truth.size(); ++i)
        if (truth[i].ts_ms > first && truth[i].value != truth[i - 1].value) last_change = truth[i].ts_ms;
    last_change = std::min(last_change, end);
    double eq_start = static_cast<double>(last_change) + 0.5 * static_cast<double>(end - last_change);
    double sq_eq = 0.0;
    std::int64_t n_eq = 0;
    for (const auto& s : samples_) {
        if (static_cast<double>(s.ts_ms) >= eq_start) {
            sq_eq += s.error * s.error;
            ++n_eq;
        }
    }
    r.rmsd_eq = n_eq ? std::sqrt(sq_eq / static_cast<double>(n_eq)) : 0.0;
    return r;
}

TruthSeries truth_from_log(const std::vector<TradeEvent>& events, const std::string& market) {
    TruthSeries out;
    for (const auto& e : events) {
        if (e.kind != ek::kTick) continue;
        const auto& truth = e.payload.at("truth");
        if (!truth.contains(market)) continue;
        double v = truth.at(market).get<double>();
        if (out.empty() || out.back().value != v) out.push_back({e.ts_ms, v});
    }
    return out;
}

RunMetrics compute_metrics(const std::vector<TradeEvent>& events, const std::string& market,
                           const TruthSeries& truth, const MetricsConfig& config) {
    engine::Engine replayed(events.empty() ? std::string() : events.front().session);
    MetricsAccumulator acc(config);
    std::optional<std::int64_t> last_sample_ts;
    std::optional<double> settled_profit;
    bool seen_market = false;

    for (const auto& e : events) {
        try {
            replayed.apply(e);
        } catch (const nlohmann::json::exception& ex) {
            throw MalformedLog(e.seq, ex.what());
        }
        if (e.kind == ek::kMarketOpened && e.payload.at("market") == market) seen_market = true;
        if (!seen_market) continue;
        const auto& m = replayed.market(market);
        if (e.kind == ek::kAccepted && e.payload.at("market") == market) {
            acc.on_fill(m.mm, m.band);
        } else if ((e.kind == ek::kTick || e.kind == ek::kWalkStep) && !truth.empty()) {
            if (last_sample_ts && *last_sample_ts == e.ts_ms) continue;
            last_sample_ts = e.ts_ms;
            acc.on_sample(e.ts_ms, m.spot(), truth_at(truth, e.ts_ms));
        } else if (e.kind == ek::kSettlement) {
            settled_profit = e.payload.at("mm_profit").at(market).get<double>();
        }
    }
    if (!seen_market) {
        if (events.empty()) return RunMetrics{};
        throw MalformedLog(0, "market " + market + " never opened");
    }
    const auto& m = replayed.market(market);
    double profit = settled_profit ? *settled_profit
                                   : (truth.empty() ? m.mm_cash : m.mm_cash - m.mm_short * truth.back().value);
    return acc.finish(truth, profit, m.buys, m.sells, m.cancels);
}

}  // namespace predmm::metrics
