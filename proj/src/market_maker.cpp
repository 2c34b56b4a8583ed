#include "predmm/market_maker.hpp"

#include <algorithm>

namespace predmm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double PriceBand::clamp(double price) const { return std::clamp(price, floor, ceiling); }

std::string kind_name(const MarketMakerState& mm) {
    return std::visit(overloaded{[](const lmsr::LmsrState&) { return std::string("lmsr"); },
                                 [](const bmm::BmmState& s) {
                                     return std::string(s.params.adaptive ? "bmm" : "zp");
                                 }},
                      mm);
}

double spot(const MarketMakerState& mm, const PriceBand& band) {
    return std::visit(overloaded{[](const lmsr::LmsrState& s) { return lmsr::spot_price(s); },
                                 [&](const bmm::BmmState& s) { return band.clamp(s.spot()); }},
                      mm);
}

double quote(const MarketMakerState& mm, Side side, double qty, const PriceBand& band) {
    return std::visit(overloaded{[&](const lmsr::LmsrState& s) { return lmsr::quote_vwap(s, side, qty); },
                                 [&](const bmm::BmmState& s) {
                                     return band.clamp(bmm::quote_vwap(s, side, qty).price);
                                 }},
                      mm);
}

double probe_spread(const MarketMakerState& mm, double qty, const PriceBand& band) {
    return quote(mm, Side::Buy, qty, band) - quote(mm, Side::Sell, qty, band);
}

MarketMakerState commit(const MarketMakerState& mm, Side side, double qty, double vwap,
                        double spot_at_quote, bool accepted) {
    return std::visit(
        overloaded{[&](const lmsr::LmsrState& s) -> MarketMakerState {
                       return accepted ? lmsr::apply_trade(s, sign(side) * qty) : s;
                   },
                   [&](const bmm::BmmState& s) -> MarketMakerState {
                       return bmm::confirm(s, side, qty, vwap, spot_at_quote, accepted).state;
                   }},
        mm);
}

}  // namespace predmm
