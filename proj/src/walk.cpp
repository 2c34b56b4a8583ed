#include "predmm/walk.hpp"

#include <cmath>
#include <cstdlib>

namespace predmm::walk {

void WalkConfig::validate() const {
    if (!(p_lr > 0 && p_lr < 1) || !(p_tb > 0 && p_tb < 1))
        throw std::invalid_argument("walk step probabilities must lie in (0, 1)");
    if (half_width < 1) throw std::invalid_argument("walk half-width S must be positive");
    if (std::abs(x0) >= half_width || std::abs(y0) >= half_width)
        throw std::invalid_argument("walk restart point must lie strictly inside the grid");
    if (step_interval_ms <= 0) throw std::invalid_argument("walk step interval must be positive");
    for (const auto& shock : shocks) {
        if (shock.at_ms < 0) throw std::invalid_argument("shock time must be non-negative");
        if (shock.latest_ms && *shock.latest_ms < shock.at_ms)
            throw std::invalid_argument("shock window ends before it starts");
        if (!(shock.probability >= 0 && shock.probability <= 1))
            throw std::invalid_argument("shock probability must lie in [0, 1]");
        apply_shock(*this, shock.change).shocks.clear();
    }
}

WalkState WalkState::start(const WalkConfig& config) { return WalkState{config.x0, config.y0, {}, 0}; }

WalkState step(const WalkState& state, const WalkConfig& config, WalkRng& rng) {
    WalkState next = state;
    next.x += rng.uniform() < config.p_lr ? 1 : -1;
    next.y += rng.uniform() < config.p_tb ? 1 : -1;
    ++next.elapsed_steps;

    const int s = config.half_width;
    if (next.x >= s) {
        ++next.hits.right;
        next.x = config.x0;
    } else if (next.x <= -s) {
        ++next.hits.left;
        next.x = config.x0;
    }
    if (next.y >= s) {
        ++next.hits.bottom;
        next.y = config.y0;
    } else if (next.y <= -s) {
        ++next.hits.top;
        next.y = config.y0;
    }
    return next;
}

double analytic_value(double p, int half_width, int x0) {
    if (!(p > 0 && p < 1)) throw std::invalid_argument("analytic_value: p must lie in (0, 1)");
    if (half_width < 1 || std::abs(x0) >= half_width)
        throw std::invalid_argument("analytic_value: need |x0| < S");
    const double s = half_width;
    if (p == 0.5) return (s + x0) / (2.0 * s);
    // (lambda^(S-x0) - lambda^(2S)) / (1 - lambda^(2S)); divide through by
    // lambda^(2S) when lambda > 1 so nothing overflows.
    double log_lambda = std::log(p) - std::log1p(-p);
    if (log_lambda > 0) {
        double num = std::expm1(-(s + x0) * log_lambda);  // lambda^-(S+x0) - 1
        double den = std::expm1(-2.0 * s * log_lambda);   // lambda^-2S - 1
        return num / den;
    }
    double num = std::exp((s - x0) * log_lambda) - std::exp(2.0 * s * log_lambda);
    double den = -std::expm1(2.0 * s * log_lambda);
    return num / den;
}

double lr_value(const WalkConfig& config) { return analytic_value(config.p_lr, config.half_width, config.x0); }
double tb_value(const WalkConfig& config) { return analytic_value(config.p_tb, config.half_width, config.y0); }

WalkConfig apply_shock(const WalkConfig& config, const ShockChange& change) {
    WalkConfig next = config;
    if (change.p_lr) next.p_lr = *change.p_lr;
    if (change.p_tb) next.p_tb = *change.p_tb;
    if (change.half_width) next.half_width = *change.half_width;
    if (change.x0) next.x0 = *change.x0;
    if (change.y0) next.y0 = *change.y0;
    if (!(next.p_lr > 0 && next.p_lr < 1) || !(next.p_tb > 0 && next.p_tb < 1) || next.half_width < 1 ||
        std::abs(next.x0) >= next.half_width || std::abs(next.y0) >= next.half_width)
        throw std::invalid_argument("shock produces an invalid walk configuration");
    return next;
}

WalkState reconcile_position(const WalkState& state, const WalkConfig& config) {
    WalkState next = state;
    if (std::abs(next.x) >= config.half_width) next.x = config.x0;
    if (std::abs(next.y) >= config.half_width) next.y = config.y0;
    return next;
}

ObservedRatio observed_ratio(const EdgeHits& hits) {
    auto horizontal = hits.left + hits.right;
    auto vertical = hits.top + hits.bottom;
    if (horizontal == 0 || vertical == 0) throw NoHits("no edge hits recorded on at least one axis");
    return {static_cast<double>(hits.right) / static_cast<double>(horizontal),
            static_cast<double>(hits.bottom) / static_cast<double>(vertical)};
}

}  // namespace predmm::walk
