#include "predmm/bmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace predmm::bmm {

using numerics::hazard;
using numerics::std_normal_cdf;
using numerics::std_normal_pdf;
using numerics::std_normal_sf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassFloor = 1e-300;

// Phi(b) - Phi(a) for a < b, taking differences in whichever tail keeps
// the significant digits.
double normal_mass(double a, double b) {
    if (a >= 0) return std_normal_sf(a) - std_normal_sf(b);
    if (b <= 0) return std_normal_cdf(b) - std_normal_cdf(a);
    return 1.0 - std_normal_cdf(a) - std_normal_sf(b);
}

double pdf_or_zero(double x) { return std::isinf(x) ? 0.0 : std_normal_pdf(x); }
double x_pdf_or_zero(double x) { return std::isinf(x) ? 0.0 : x * std_normal_pdf(x); }

// Mean and variance of a standard normal truncated to (a, b).
std::pair<double, double> truncated_moments(double a, double b) {
    if (std::isinf(b) && !std::isinf(a)) {
        double r = hazard(a);
        return {r, 1.0 + a * r - r * r};
    }
    if (std::isinf(a) && !std::isinf(b)) {
        double r = hazard(-b);
        return {-r, 1.0 - b * r - r * r};
    }
    double z = normal_mass(a, b);
    if (!(z >= kMassFloor)) {
        std::ostringstream os;
        os << "range observation has probability " << z << " under the predictive distribution";
        throw DegenerateObservation(os.str());
    }
    double m = (pdf_or_zero(a) - pdf_or_zero(b)) / z;
    double v = 1.0 + (x_pdf_or_zero(a) - x_pdf_or_zero(b)) / z - m * m;
    return {m, v};
}

}  // namespace

void BmmBelief::validate() const {
    if (!(sigma > 0)) throw std::invalid_argument("BMM sigma must be positive");
    if (!(sigma_eps > 0)) throw std::invalid_argument("BMM sigma_eps must be positive");
    if (!(sigma_cap >= sigma)) throw std::invalid_argument("BMM sigma must not exceed sigma_cap");
    if (!std::isfinite(mu)) throw std::invalid_argument("BMM mu must be finite");
}

double RangeObservation::lower_or_inf() const { return lower.value_or(-kInf); }
double RangeObservation::upper_or_inf() const { return upper.value_or(kInf); }

void BmmParams::validate() const {
    if (window == 0) throw std::invalid_argument("BMM window must be at least 1");
    if (!(alpha > 0)) throw std::invalid_argument("BMM mini-order size alpha must be positive");
    if (!(doubling_multiplier > 1)) throw std::invalid_argument("BMM doubling multiplier must exceed 1");
    quadrature.validate();
}

void BmmState::validate() const {
    belief.validate();
    params.validate();
    if (window.size() > params.window) throw std::invalid_argument("BMM window exceeds capacity");
}

double q_function(double rho) {
    if (!(rho > 0)) throw std::invalid_argument("q_function: rho must be positive");
    double rho2 = rho * rho;
    double k = rho2 / (1.0 + rho2);
    // f(z) = z - k*hazard(z) is negative at 0, and positive once z > rho
    // because hazard(z) < z + 1/z.
    auto f = [k](double z) { return z - k * hazard(z); };
    return numerics::find_root(f, 0.0, rho + 1.0, 1e-13);
}

namespace {

double half_spread(const BmmBelief& belief) {
    double rho = belief.rho();
    return belief.sigma_eps * q_function(rho) * std::sqrt(1.0 + rho * rho);
}

}  // namespace

double ask_price(const BmmBelief& belief) { return belief.mu + half_spread(belief); }
double bid_price(const BmmBelief& belief) { return belief.mu - half_spread(belief); }

BmmBelief range_update(const BmmBelief& belief, const RangeObservation& obs) {
    if (obs.vacuous()) return belief;
    double lo = obs.lower_or_inf();
    double hi = obs.upper_or_inf();
    if (!(lo < hi)) throw std::invalid_argument("range observation needs lower < upper");

    double s2 = belief.sigma * belief.sigma;
    double e2 = belief.sigma_eps * belief.sigma_eps;
    double tau2 = s2 + e2;
    double tau = std::sqrt(tau2);
    double k = s2 / tau2;
    double a = (lo - belief.mu) / tau;
    double b = (hi - belief.mu) / tau;

    auto [m, v] = truncated_moments(a, b);
    v = std::max(v, 0.0);

    BmmBelief next = belief;
    next.mu = belief.mu + k * tau * m;
    next.sigma = std::sqrt(k * k * tau2 * v + s2 * e2 / tau2);
    return next;
}

LadderQuote quote_vwap(const BmmState& state, Side side, double qty) {
    if (!(qty > 0)) throw std::invalid_argument("BMM quote quantity must be positive");
    const double alpha = state.params.alpha;
    auto rungs = static_cast<std::size_t>(std::ceil(qty / alpha - 1e-12));
    rungs = std::max<std::size_t>(rungs, 1);

    LadderQuote out{0.0, {}, state.belief};
    out.ladder.reserve(rungs);
    double notional = 0.0;
    BmmBelief& belief = out.final_belief;
    for (std::size_t i = 0; i < rungs; ++i) {
        double size = (i + 1 == rungs) ? qty - alpha * static_cast<double>(rungs - 1) : alpha;
        double price = side == Side::Buy ? ask_price(belief) : bid_price(belief);
        out.ladder.push_back({size, price});
        notional += size * price;
        RangeObservation filled = side == Side::Buy ? RangeObservation{price, std::nullopt}
                                                    : RangeObservation{std::nullopt, price};
        belief = range_update(belief, filled);
    }
    out.price = notional / qty;
    return out;
}

RangeObservation observation_for(Side side, double quoted_price, double spot_at_quote, bool accepted) {
    if (side == Side::Buy) {
        if (accepted) return {quoted_price, std::nullopt};
        return {spot_at_quote, quoted_price};
    }
    if (accepted) return {std::nullopt, quoted_price};
    return {quoted_price, spot_at_quote};
}

ConfirmResult confirm(const BmmState& state, Side side, double qty, double quoted_price,
                      double spot_at_quote, bool accepted) {
    ConfirmResult result{state};
    RangeObservation obs = observation_for(side, quoted_price, spot_at_quote, accepted);
    bool ordered = obs.lower_or_inf() < obs.upper_or_inf();

    if (!ordered) {
        // zero-width interval: quote collapsed onto the spot, nothing to learn
        result.update_skipped = true;
    } else {
        try {
            if (accepted && state.params.commit_ladder_on_accept)
                result.state.belief = quote_vwap(state, side, qty).final_belief;
            else
                result.state.belief = range_update(state.belief, obs);
        } catch (const DegenerateObservation&) {
            result.update_skipped = true;
        }
        auto& window = result.state.window;
        window.push_back(obs);
        if (window.size() > state.params.window) window.erase(window.begin());
    }

    if (state.params.adaptive) {
        auto [checked, fired] = consistency_check(result.state);
        result.state = std::move(checked);
        result.variance_expanded = fired;
    }
    return result;
}

double window_likelihood(const BmmBelief& belief, const std::vector<RangeObservation>& window,
                         double sigma_multiplier, const numerics::QuadratureSpec& spec) {
    if (window.empty()) throw std::invalid_argument("window_likelihood: window is empty");
    if (!(sigma_multiplier > 0)) throw std::invalid_argument("window_likelihood: multiplier must be positive");
    const double eps = belief.sigma_eps;
    auto integrand = [&](double v) {
        double prod = 1.0;
        for (const auto& obs : window) {
            double a = (obs.lower_or_inf() - v) / eps;
            double b = (obs.upper_or_inf() - v) / eps;
            prod *= normal_mass(a, b);
            if (prod == 0.0) break;
        }
        return prod;
    };
    double l = numerics::integrate_gaussian_weighted(integrand, belief.mu, sigma_multiplier * belief.sigma, spec);
    return std::clamp(l, 0.0, 1.0);
}

double consistency_index(const BmmState& state) {
    const auto& p = state.params;
    return window_likelihood(state.belief, state.window, p.doubling_multiplier, p.quadrature) -
           window_likelihood(state.belief, state.window, 1.0, p.quadrature);
}

std::pair<BmmState, bool> consistency_check(const BmmState& state) {
    if (state.window.size() < state.params.window) return {state, false};
    if (state.belief.sigma >= state.belief.sigma_cap) return {state, false};
    if (consistency_index(state) <= 0.0) return {state, false};
    BmmState next = state;
    next.belief.sigma = std::min(state.belief.sigma * state.params.doubling_multiplier, state.belief.sigma_cap);
    return {next, true};
}

}  // namespace predmm::bmm
