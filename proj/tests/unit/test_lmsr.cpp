#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "predmm/lmsr.hpp"

using namespace predmm;
using namespace predmm::lmsr;

namespace {
const LmsrState kFresh{0.0, 125.0, 100.0};
}

TEST_CASE("spot price") {
    CHECK(spot_price(kFresh) == 50.0);
    LmsrState s{100.0, 125.0, 100.0};
    CHECK(spot_price(s) == doctest::Approx(68.997448).epsilon(1e-8));

    // derivative of the cost function at dq = 0
    double h = 1e-4;
    double derivative = (trade_cost(s, h) - trade_cost(s, -h)) / (2 * h);
    CHECK(std::abs(derivative - spot_price(s)) < 1e-6);

    for (double q : {1.0, 37.5, 400.0, 5000.0})
        CHECK(spot_price({q, 125.0, 100.0}) + spot_price({-q, 125.0, 100.0}) == doctest::Approx(100.0));
    for (double q = -2000.0; q < 2000.0; q += 7.0)
        CHECK(spot_price({q, 125.0, 100.0}) > spot_price({q - 1.0, 125.0, 100.0}));
    CHECK(spot_price({1e6, 125.0, 100.0}) <= 100.0);
    CHECK(spot_price({-1e6, 125.0, 100.0}) >= 0.0);
}

TEST_CASE("trade cost") {
    CHECK(trade_cost(kFresh, 0.0) == 0.0);
    double by_integral = oracle::simpson([](double q) { return spot_price({q, 125.0, 100.0}); }, 0.0, 100.0, 2000);
    CHECK(trade_cost(kFresh, 100.0) == doctest::Approx(by_integral).epsilon(1e-12));
    CHECK(trade_cost(kFresh, 100.0) == doctest::Approx(5974.4186).epsilon(1e-8));

    CHECK(trade_cost(kFresh, 20.0) > 0.0);
    CHECK(trade_cost(kFresh, -20.0) < 0.0);

    auto after = apply_trade(kFresh, 37.0);
    CHECK(std::abs(trade_cost(kFresh, 37.0) + trade_cost(after, -37.0)) < 1e-9);

    SUBCASE("additive along any split") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-300.0, 300.0);
        for (int i = 0; i < 500; ++i) {
            LmsrState s{u(rng), 125.0, 100.0};
            double a = u(rng), b = u(rng);
            double split = trade_cost(s, a) + trade_cost(apply_trade(s, a), b);
            CHECK(std::abs(split - trade_cost(s, a + b)) < 1e-9);
        }
    }
}

TEST_CASE("quote vwap") {
    CHECK(quote_vwap(kFresh, Side::Buy, 1e-7) == doctest::Approx(50.0).epsilon(1e-8));
    CHECK(quote_vwap(kFresh, Side::Buy, 100.0) == doctest::Approx(59.744186).epsilon(1e-8));
    for (double q : {1.0, 20.0, 40.0, 250.0})
        CHECK(quote_vwap(kFresh, Side::Buy, q) + quote_vwap(kFresh, Side::Sell, q) == doctest::Approx(100.0));

    LmsrState s{-80.0, 125.0, 100.0};
    double buy = quote_vwap(s, Side::Buy, 40.0);
    CHECK(buy > spot_price(s));
    CHECK(buy < spot_price(apply_trade(s, 40.0)));
    double sell = quote_vwap(s, Side::Sell, 40.0);
    CHECK(sell < spot_price(s));
    CHECK(sell > spot_price(apply_trade(s, -40.0)));
    CHECK_THROWS(quote_vwap(s, Side::Buy, 0.0));
}

TEST_CASE("spread") {
    CHECK(spread(kFresh, 100.0) == doctest::Approx(19.4883713470).epsilon(1e-10));
    CHECK(spread(kFresh, 1e-6) < 1e-5);
    CHECK(spread(kFresh, 1e-6) > 0.0);

    SUBCASE("closed form matches the two VWAPs") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> uq(-600.0, 600.0), uQ(0.5, 300.0), ub(10.0, 500.0);
        for (int i = 0; i < 2000; ++i) {
            LmsrState s{uq(rng), ub(rng), 100.0};
            double Q = uQ(rng);
            double diff = quote_vwap(s, Side::Buy, Q) - quote_vwap(s, Side::Sell, Q);
            CHECK(std::abs(spread(s, Q) - diff) < 1e-9);
            CHECK(spread(s, Q) > 0.0);
        }
    }
    SUBCASE("decreasing in b at zero inventory") {
        for (double Q : {5.0, 20.0, 40.0, 200.0})
            for (double b = 20.0; b < 1000.0; b *= 1.5)
                CHECK(spread({0.0, b * 1.5, 100.0}, Q) < spread({0.0, b, 100.0}, Q));
    }
}

TEST_CASE("apply trade") {
    CHECK(apply_trade(kFresh, 0.0) == kFresh);
    CHECK(apply_trade(apply_trade(kFresh, 20.0), -20.0) == kFresh);
    CHECK(apply_trade(kFresh, 20.0).b == kFresh.b);
}

TEST_CASE("loss bound") {
    CHECK(loss_bound(125.0, 100.0) == doctest::Approx(8664.34).epsilon(1e-6));
    CHECK(loss_bound(1.0, 1.0) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(loss_bound(250.0, 100.0) == doctest::Approx(2.0 * loss_bound(125.0, 100.0)));

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> size(-150.0, 150.0);
    for (int run = 0; run < 200; ++run) {
        LmsrState s = kFresh;
        double cash = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double dq = size(rng);
            cash += trade_cost(s, dq);
            s = apply_trade(s, dq);
        }
        for (double outcome : {0.0, 100.0}) {
            double loss = s.q * outcome - cash;
            CHECK(loss <= loss_bound(125.0, 100.0) + 1e-6);
        }
    }
}

TEST_CASE("equilibrium fluctuation") {
    CHECK(equilibrium_fluctuation(0.0, 125.0, 125.0) == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));
    CHECK(equilibrium_fluctuation(0.0, 125.0, 125.0) == doctest::Approx(0.4621).epsilon(1e-4));
    CHECK(equilibrium_fluctuation(0.0, 1e-9, 125.0) < 1e-10);
    double prev = 1.0;
    for (double q = 0.0; q < 2000.0; q += 50.0) {
        double f = equilibrium_fluctuation(q, 40.0, 125.0);
        CHECK(f > 0.0);
        CHECK(f < 1.0);
        CHECK(f <= prev);
        prev = f;
    }
}
