#pragma once

#include "predmm/types.hpp"

namespace predmm::lmsr {

/// Inventory state of a single binary LMSR market. `q` is the net number of
/// YES shares sold by the market maker; prices are quoted on [0, scale].
struct LmsrState {
    double q = 0.0;
    double b = 125.0;
    double scale = 100.0;

    void validate() const;
    friend bool operator==(const LmsrState&, const LmsrState&) = default;
};

double spot_price(const LmsrState& state);

/// Amount the trader pays for `dq` shares (negative when selling).
double trade_cost(const LmsrState& state, double dq);

double quote_vwap(const LmsrState& state, Side side, double qty);

/// Buy VWAP minus sell VWAP for `qty` shares, from the closed form.
double spread(const LmsrState& state, double qty);

LmsrState apply_trade(const LmsrState& state, double dq);

double loss_bound(double b, double scale = 100.0);

/// Size of the price move caused by a Q-share trade around equilibrium
/// inventory q_eq, in probability units.
double equilibrium_fluctuation(double q_eq, double qty, double b);

}  // namespace predmm::lmsr
