#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "predmm/numerics.hpp"
#include "predmm/types.hpp"

namespace predmm::bmm {

/// Thrown when a two-sided range observation carries essentially no
/// probability mass under the predictive signal distribution.
class DegenerateObservation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gaussian belief N(mu, sigma^2) over the security value, plus the assumed
/// trader signal noise sigma_eps.
struct BmmBelief {
    double mu = 50.0;
    double sigma = 12.0;
    double sigma_eps = 5.0;
    double sigma_cap = 50.0;

    /// Information disadvantage sigma / sigma_eps.
    double rho() const { return sigma / sigma_eps; }
    void validate() const;
    friend bool operator==(const BmmBelief&, const BmmBelief&) = default;
};

/// The trader's private signal is known to lie in (lower, upper); an empty
/// bound is unbounded on that side.
struct RangeObservation {
    std::optional<double> lower;
    std::optional<double> upper;

    double lower_or_inf() const;
    double upper_or_inf() const;
    bool vacuous() const { return !lower && !upper; }
    friend bool operator==(const RangeObservation&, const RangeObservation&) = default;
};

struct BmmParams {
    std::size_t window = 5;
    double alpha = 1.0;
    bool adaptive = true;
    double doubling_multiplier = 2.0;
    /// On acceptance, commit the fictitious mini-order belief instead of a
    /// single range update at the VWAP.
    bool commit_ladder_on_accept = false;
    numerics::QuadratureSpec quadrature{};

    void validate() const;
    friend bool operator==(const BmmParams&, const BmmParams&) = default;
};

struct BmmState {
    BmmBelief belief;
    std::vector<RangeObservation> window;  // oldest first, at most params.window
    BmmParams params;

    double spot() const { return belief.mu; }
    void validate() const;
    friend bool operator==(const BmmState&, const BmmState&) = default;
};

/// Positive root of z = rho^2 / (1 + rho^2) * hazard(z). This is the ask
/// offset, in units of the predictive signal sd, at which the expected value
/// given a trade equals the ask.
double q_function(double rho);

double ask_price(const BmmBelief& belief);
double bid_price(const BmmBelief& belief);

/// Moment-matched Gaussian posterior after learning that the signal of a
/// trader fell inside `obs`.
BmmBelief range_update(const BmmBelief& belief, const RangeObservation& obs);

struct LadderRung {
    double size;
    double price;
};

struct LadderQuote {
    double price;                  // VWAP over the ladder
    std::vector<LadderRung> ladder;
    BmmBelief final_belief;        // fictitious belief after the last rung
};

LadderQuote quote_vwap(const BmmState& state, Side side, double qty);

struct ConfirmResult {
    BmmState state;
    bool update_skipped = false;    // observation was degenerate
    bool variance_expanded = false; // consistency check fired
};

/// Learn from a trader's reaction to a quote. The observation is
///   buy accepted:  (quoted, +inf)     buy canceled:  (spot, quoted)
///   sell accepted: (-inf, quoted)     sell canceled: (quoted, spot)
ConfirmResult confirm(const BmmState& state, Side side, double qty, double quoted_price,
                      double spot_at_quote, bool accepted);

RangeObservation observation_for(Side side, double quoted_price, double spot_at_quote, bool accepted);

/// Marginal probability of the window under N(mu, (multiplier*sigma)^2).
double window_likelihood(const BmmBelief& belief, const std::vector<RangeObservation>& window,
                         double sigma_multiplier, const numerics::QuadratureSpec& spec = {});

/// L(mu, m*sigma) - L(mu, sigma) with m the doubling multiplier.
double consistency_index(const BmmState& state);

/// Expands sigma once when the full window is more likely under the wider
/// belief. The second member reports whether it fired.
std::pair<BmmState, bool> consistency_check(const BmmState& state);

}  // namespace predmm::bmm
