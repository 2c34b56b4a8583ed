#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace predmm {

enum class Side { Buy, Sell };

inline std::string_view to_string(Side side) { return side == Side::Buy ? "buy" : "sell"; }

inline Side side_from_string(std::string_view s) {
    if (s == "buy") return Side::Buy;
    if (s == "sell") return Side::Sell;
    throw std::invalid_argument("unknown side: " + std::string(s));
}

/// +1 for buys, -1 for sells.
inline int sign(Side side) { return side == Side::Buy ? 1 : -1; }

}  // namespace predmm
