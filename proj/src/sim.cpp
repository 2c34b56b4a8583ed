#include "predmm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "predmm/engine.hpp"

namespace predmm::sim {

namespace {

double clamp_value(double v) { return std::clamp(v, 0.0, 100.0); }

}  // namespace

std::string to_string(JumpKind kind) {
    switch (kind) {
        case JumpKind::None: return "none";
        case JumpKind::Gaussian: return "gaussian";
        case JumpKind::Uniform: return "uniform";
    }
    return "none";
}

JumpKind jump_kind_from_string(const std::string& s) {
    if (s == "none") return JumpKind::None;
    if (s == "gaussian") return JumpKind::Gaussian;
    if (s == "uniform") return JumpKind::Uniform;
    throw std::invalid_argument("unknown jump kind: " + s);
}

void SimConfig::validate() const {
    if (steps < 1) throw std::invalid_argument("steps must be positive");
    if (!(p_jump >= 0 && p_jump <= 1)) throw std::invalid_argument("jump probability must lie in [0, 1]");
    if (!(sigma_eps > 0)) throw std::invalid_argument("trader noise must be positive");
    if (!(qty_rate > 0)) throw std::invalid_argument("quantity rate must be positive");
    if (!(init_sd >= 0) || !(sigma_jump >= 0)) throw std::invalid_argument("standard deviations must be non-negative");
}

SimResult run_simulation(const SimConfig& config, const MarketMakerState& mm) {
    config.validate();
    // Separate streams keep the true-value path identical across market makers.
    std::mt19937_64 truth_rng(config.seed);
    std::mt19937_64 trader_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> qty_dist(config.qty_rate);

    engine::Engine ex("sim-" + std::to_string(config.seed));
    ex.open_market(kMarket, mm, 0);
    ex.register_trader(kTrader, engine::Endowment{0.0, 0.0, true}, 0);

    metrics::MetricsAccumulator online(config.metrics);
    metrics::TruthSeries truth_series;

    double truth = clamp_value(config.init_mean + config.init_sd * std_normal(truth_rng));
    std::size_t script_pos = 0;

    SimResult result;
    result.series.reserve(config.steps);
    for (int t = 0; t < config.steps; ++t) {
        const std::int64_t ts = t;
        if (!config.scripted_truth.empty()) {
            while (script_pos < config.scripted_truth.size() && config.scripted_truth[script_pos].first <= t)
                truth = config.scripted_truth[script_pos++].second;
        } else if (t > 0 && config.jumps != JumpKind::None && unit(truth_rng) < config.p_jump) {
            truth = config.jumps == JumpKind::Gaussian
                        ? clamp_value(truth + config.sigma_jump * std_normal(truth_rng))
                        : 100.0 * unit(truth_rng);
        }
        if (truth_series.empty() || truth_series.back().value != truth) truth_series.push_back({ts, truth});

        double valuation = clamp_value(truth + config.sigma_eps * std_normal(trader_rng));
        double spot_now = ex.market(kMarket).spot();
        Side side = valuation > spot_now ? Side::Buy : Side::Sell;
        auto qty = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(qty_dist(trader_rng))));

        auto q = ex.request_quote(kMarket, kTrader, side, qty, ts);
        bool accept = side == Side::Buy ? q.vwap <= valuation : q.vwap >= valuation;
        ex.confirm_quote(q.id, accept, ts);
        const auto& m = ex.market(kMarket);
        if (accept) online.on_fill(m.mm, m.band);

        ex.log().append(ts, event_kind::kTick, {{"step", t}, {"truth", {{kMarket, truth}}}});
        double spot_after = m.spot();
        online.on_sample(ts, spot_after, truth);

        double probe = probe_spread(m.mm, config.metrics.probe_qty, m.band);
        result.series.push_back({t, truth, spot_after, config.metrics.half_spread ? 0.5 * probe : probe});
    }

    auto report = ex.settle({{kMarket, truth}}, config.steps);
    const auto& m = ex.market(kMarket);
    result.metrics = online.finish(truth_series, report.mm_profit.at(kMarket), m.buys, m.sells, m.cancels);
    result.log = ex.log().events();
    result.final_mm = m.mm;
    return result;
}

Summary aggregate(const std::vector<metrics::RunMetrics>& runs, std::string mm, std::string regime) {
    if (runs.empty()) throw std::invalid_argument("aggregate needs at least one run");
    Summary s;
    s.mm = std::move(mm);
    s.regime = std::move(regime);
    s.runs = runs.size();
    for (const auto& r : runs) {
        s.mean_profit += r.mm_profit;
        s.max_loss = std::max(s.max_loss, r.mm_max_loss);
        s.mean_spread += r.avg_spread;
        s.mean_rmsd += r.rmsd;
        s.mean_rmsd_eq += r.rmsd_eq;
    }
    double n = static_cast<double>(runs.size());
    s.mean_profit /= n;
    s.mean_spread /= n;
    s.mean_rmsd /= n;
    s.mean_rmsd_eq /= n;
    return s;
}

std::vector<metrics::RunMetrics> run_batch(const SimConfig& config, const MarketMakerState& mm, std::size_t runs) {
    std::vector<metrics::RunMetrics> out;
    out.reserve(runs);
    for (std::size_t i = 0; i < runs; ++i) {
        SimConfig c = config;
        c.seed = config.seed + i;
        out.push_back(run_simulation(c, mm).metrics);
    }
    return out;
}

}  // namespace predmm::sim
