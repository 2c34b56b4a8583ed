#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "predmm/event_log.hpp"
#include "predmm/market_maker.hpp"

namespace predmm::metrics {

/// How spreads are probed: buy VWAP minus sell VWAP for `probe_qty` shares,
/// halved when `half_spread` is set.
struct MetricsConfig {
    double probe_qty = 40.0;
    bool half_spread = false;
};

struct TruthPoint {
    std::int64_t ts_ms;
    double value;
};

/// Piecewise-constant true value, as sorted change points.
using TruthSeries = std::vector<TruthPoint>;

double truth_at(const TruthSeries& truth, std::int64_t ts_ms);

struct RunMetrics {
    double mm_profit = 0.0;
    double mm_max_loss = 0.0;
    double avg_spread = 0.0;
    double rmsd = 0.0;
    double rmsd_eq = 0.0;
    std::int64_t buys = 0;
    std::int64_t sells = 0;
    std::int64_t cancels = 0;
    std::int64_t samples = 0;

    nlohmann::json to_json() const;
    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Streaming accumulator shared by the online (simulation) and offline
/// (log replay) paths.
class MetricsAccumulator {
public:
    explicit MetricsAccumulator(MetricsConfig config) : config_(config) {}

    void on_fill(const MarketMakerState& mm, const PriceBand& band);
    void on_sample(std::int64_t ts_ms, double spot, double truth);
    RunMetrics finish(const TruthSeries& truth, double mm_profit, std::int64_t buys, std::int64_t sells,
                      std::int64_t cancels) const;

private:
    struct Sample {
        std::int64_t ts_ms;
        double error;
    };
    MetricsConfig config_;
    double spread_sum_ = 0.0;
    std::int64_t spread_count_ = 0;
    std::vector<Sample> samples_;
};

/// Change points of one market's true value, read from tick payloads
/// {"truth": {market: value}}.
TruthSeries truth_from_log(const std::vector<TradeEvent>& events, const std::string& market);

/// Replays the log and measures one market. Spot is sampled at each new
/// timestamp carrying a tick or walk_step record, spreads at each fill.
/// Profit comes from the settlement record, or is marked at the last true
/// value when the log was never settled.
RunMetrics compute_metrics(const std::vector<TradeEvent>& events, const std::string& market,
                           const TruthSeries& truth, const MetricsConfig& config);

}  // namespace predmm::metrics
