#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace predmm::walk {

class NoHits : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters that a shock may replace. Unset fields keep their value.
struct ShockChange {
    std::optional<double> p_lr;
    std::optional<double> p_tb;
    std::optional<int> half_width;
    std::optional<int> x0;
    std::optional<int> y0;
    friend bool operator==(const ShockChange&, const ShockChange&) = default;
};

/// A scheduled parameter change. When `latest_ms` is set the firing time is
/// drawn uniformly from [at_ms, latest_ms]; `probability` < 1 makes the shock
/// itself random. Both are resolved once when the session starts.
struct Shock {
    std::int64_t at_ms = 0;
    std::optional<std::int64_t> latest_ms;
    double probability = 1.0;
    ShockChange change;
    friend bool operator==(const Shock&, const Shock&) = default;
};

/// Two independent gambler's-ruin walks on [-S, S]^2. `p_lr` is the
/// probability of a right step, `p_tb` of a down step (y grows downward, the
/// bottom edge is y = +S).
struct WalkConfig {
    double p_lr = 0.6;
    double p_tb = 0.6;
    int half_width = 4;
    int x0 = -1;
    int y0 = -1;
    std::int64_t step_interval_ms = 100;
    std::vector<Shock> shocks;

    void validate() const;
    friend bool operator==(const WalkConfig&, const WalkConfig&) = default;
};

struct EdgeHits {
    std::uint64_t left = 0;
    std::uint64_t right = 0;
    std::uint64_t top = 0;
    std::uint64_t bottom = 0;
    friend bool operator==(const EdgeHits&, const EdgeHits&) = default;
};

struct WalkState {
    int x = 0;
    int y = 0;
    EdgeHits hits;
    std::uint64_t elapsed_steps = 0;

    static WalkState start(const WalkConfig& config);
    friend bool operator==(const WalkState&, const WalkState&) = default;
};

/// Walk RNG. Draws are converted to doubles explicitly so a seed replays the
/// same path on every standard library.
class WalkRng {
public:
    explicit WalkRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

WalkState step(const WalkState& state, const WalkConfig& config, WalkRng& rng);

/// Probability that a walk started at x0 with up-step probability p reaches
/// +S before -S.
double analytic_value(double p, int half_width, int x0);

/// Values of the LR and TB markets for a configuration.
double lr_value(const WalkConfig& config);
double tb_value(const WalkConfig& config);

/// Applies a shock's changes. Position is kept unless it now lies outside
/// the narrowed grid, in which case that axis restarts.
WalkConfig apply_shock(const WalkConfig& config, const ShockChange& change);
WalkState reconcile_position(const WalkState& state, const WalkConfig& config);

struct ObservedRatio {
    double v_lr;
    double v_tb;
};

ObservedRatio observed_ratio(const EdgeHits& hits);

}  // namespace predmm::walk
