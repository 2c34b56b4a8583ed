#include "predmm/lmsr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace predmm::lmsr {

namespace {

// log(1 + e^x) without overflow
double softplus(double x) {
    if (x > 0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double log_cosh(double x) {
    double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// log(sinh(w)) for w > 0
double log_sinh(double w) {
    if (w < 1.0) return std::log(std::sinh(w));
    return w + std::log1p(-std::exp(-2.0 * w)) - std::numbers::ln2;
}

double logistic(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// softplus(x + d) - softplus(x) without cancellation for small d
double softplus_step(double x, double d) {
    if (d < 0) return -softplus_step(x + d, -d);
    if (d < 30.0) return std::log1p(logistic(x) * std::expm1(d));
    return softplus(x + d) - softplus(x);
}

}  // namespace

void LmsrState::validate() const {
    if (!(b > 0)) throw std::invalid_argument("LMSR liquidity b must be positive");
    if (!(scale > 0)) throw std::invalid_argument("LMSR payoff scale must be positive");
}

double spot_price(const LmsrState& state) {
    return state.scale * logistic(state.q / state.b);
}

double trade_cost(const LmsrState& state, double dq) {
    if (dq == 0.0) return 0.0;
    return state.scale * state.b * softplus_step(state.q / state.b, dq / state.b);
}

double quote_vwap(const LmsrState& state, Side side, double qty) {
    if (!(qty > 0)) throw std::invalid_argument("LMSR quote quantity must be positive");
    return std::abs(trade_cost(state, sign(side) * qty)) / qty;
}

double spread(const LmsrState& state, double qty) {
    if (!(qty > 0)) throw std::invalid_argument("LMSR spread quantity must be positive");
    // (cosh x + cosh y) / (2 cosh^2(x/2)) = 1 + sinh^2(y/2) / cosh^2(x/2)
    double x = state.q / state.b;
    double y = qty / state.b;
    double t = 2.0 * (log_sinh(0.5 * y) - log_cosh(0.5 * x));
    return state.scale * state.b / qty * softplus(t);
}

LmsrState apply_trade(const LmsrState& state, double dq) {
    LmsrState next = state;
    next.q += dq;
    return next;
}

double loss_bound(double b, double scale) { return scale * b * std::numbers::ln2; }

double equilibrium_fluctuation(double q_eq, double qty, double b) {
    if (!(qty > 0)) throw std::invalid_argument("fluctuation quantity must be positive");
    // sinh(y) / (cosh(x) + cosh(y)), scaled by e^-m to avoid overflow
    double x = std::abs(q_eq / b);
    double y = qty / b;
    double m = std::max(x, y);
    double num = 0.5 * (std::exp(y - m) - std::exp(-y - m));
    double den = 0.5 * (std::exp(x - m) + std::exp(-x - m) + std::exp(y - m) + std::exp(-y - m));
    return num / den;
}

}  // namespace predmm::lmsr
