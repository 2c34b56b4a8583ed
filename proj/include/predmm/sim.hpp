#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "predmm/event_log.hpp"
#include "predmm/market_maker.hpp"
#include "predmm/metrics.hpp"

namespace predmm::sim {

enum class JumpKind { None, Gaussian, Uniform };

std::string to_string(JumpKind kind);
JumpKind jump_kind_from_string(const std::string& s);

struct SimConfig {
    int steps = 200;
    double init_mean = 50.0;
    double init_sd = 12.0;
    double p_jump = 0.01;
    JumpKind jumps = JumpKind::Gaussian;
    double sigma_jump = 5.0;
    double sigma_eps = 5.0;
    double qty_rate = 0.05;
    std::uint64_t seed = 1;
    /// Overrides the random true-value process: (step, value) change points.
    std::vector<std::pair<int, double>> scripted_truth;
    metrics::MetricsConfig metrics{20.0, true};

    void validate() const;
};

struct StepRecord {
    int step;
    double truth;
    double spot;
    double spread;
};

struct SimResult {
    metrics::RunMetrics metrics;
    std::vector<StepRecord> series;
    std::vector<TradeEvent> log;
    MarketMakerState final_mm;
};

inline constexpr const char* kMarket = "M";
inline constexpr const char* kTrader = "population";

/// One run: `steps` noisy traders arrive in turn, each quoted through the
/// engine and accepting only if the VWAP is still on the profitable side of
/// their private valuation.
SimResult run_simulation(const SimConfig& config, const MarketMakerState& mm);

struct Summary {
    std::string mm;
    std::string regime;
    std::size_t runs = 0;
    double mean_profit = 0.0;
    double max_loss = 0.0;
    double mean_spread = 0.0;
    double mean_rmsd = 0.0;
    double mean_rmsd_eq = 0.0;
};

Summary aggregate(const std::vector<metrics::RunMetrics>& runs, std::string mm = {}, std::string regime = {});

/// Runs `runs` simulations with seeds base_seed, base_seed+1, ...
std::vector<metrics::RunMetrics> run_batch(const SimConfig& config, const MarketMakerState& mm, std::size_t runs);

}  // namespace predmm::sim
