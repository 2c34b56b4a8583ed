#pragma once

#include <string>
#include <variant>

#include "predmm/bmm.hpp"
#include "predmm/lmsr.hpp"
#include "predmm/types.hpp"

namespace predmm {

/// Either market maker behind the common quoting interface used by the engine.
using MarketMakerState = std::variant<lmsr::LmsrState, bmm::BmmState>;

/// BMM beliefs are unbounded; the prices it shows are clamped to this band.
struct PriceBand {
    double floor = 0.01;
    double ceiling = 99.99;
    double clamp(double price) const;
};

std::string kind_name(const MarketMakerState& mm);

/// Infinitesimal price shown to traders.
double spot(const MarketMakerState& mm, const PriceBand& band = {});

/// VWAP for `qty` shares on committed state.
double quote(const MarketMakerState& mm, Side side, double qty, const PriceBand& band = {});

/// buy VWAP - sell VWAP for a probe size.
double probe_spread(const MarketMakerState& mm, double qty, const PriceBand& band = {});

/// Advances the market maker after a trader accepts or walks away from a
/// quote. LMSR only moves on acceptance.
MarketMakerState commit(const MarketMakerState& mm, Side side, double qty, double vwap,
                        double spot_at_quote, bool accepted);

}  // namespace predmm
