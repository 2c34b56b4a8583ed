#pragma once

// Independent reference computations used only by tests. Nothing here calls
// the closed forms it is used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>

#include "predmm/numerics.hpp"

namespace oracle {

/// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

/// exp(x) from its Taylor series.
inline double exp_series(double x) {
    double term = 1.0, sum = 1.0;
    for (int n = 1; n < 60; ++n) {
        term *= x / n;
        sum += term;
    }
    return sum;
}

/// Inverse Mills ratio from the asymptotic expansion of the Mills ratio,
/// truncated at its smallest term.
inline double hazard_asymptotic(double z) {
    double z2 = z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 200; ++n) {
        double next = -term * (2.0 * n - 1.0) / z2;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
    }
    return z / sum;
}

struct Moments {
    double mass;
    double mean;
    double var;
};

/// Posterior moments of v ~ N(mu, sigma^2) after observing that
/// s = v + N(0, sigma_eps^2) fell inside (lo, hi), by quadrature of the
/// exact unnormalized posterior.
inline Moments posterior_by_quadrature(double mu, double sigma, double sigma_eps, double lo, double hi) {
    using predmm::numerics::integrate_gaussian_weighted;
    using predmm::numerics::std_normal_cdf;
    auto like = [&](double v) {
        double a = (lo - v) / sigma_eps;
        double b = (hi - v) / sigma_eps;
        if (a > 0) return predmm::numerics::std_normal_sf(a) - predmm::numerics::std_normal_sf(b);
        return std_normal_cdf(b) - std_normal_cdf(a);
    };
    predmm::numerics::QuadratureSpec spec{128, 12.0};
    double z = integrate_gaussian_weighted(like, mu, sigma, spec);
    double m1 = integrate_gaussian_weighted([&](double v) { return (v - mu) * like(v); }, mu, sigma, spec) / z;
    double m2 = integrate_gaussian_weighted([&](double v) { return (v - mu) * (v - mu) * like(v); }, mu, sigma,
                                            spec) / z;
    return {z, mu + m1, m2 - m1 * m1};
}

struct McEstimate {
    double mean;
    double stderr_;
    std::int64_t hits;
};

/// Monte-Carlo E[v | s > threshold] with v ~ N(mu, sigma^2), s = v + noise.
inline McEstimate conditional_value_above(double mu, double sigma, double sigma_eps, double threshold,
                                          std::int64_t draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    double sum = 0.0, sum2 = 0.0;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < draws; ++i) {
        double v = mu + sigma * n01(rng);
        double s = v + sigma_eps * n01(rng);
        if (s > threshold) {
            sum += v;
            sum2 += v * v;
            ++hits;
        }
    }
    double mean = sum / hits;
    double var = sum2 / hits - mean * mean;
    return {mean, std::sqrt(var / hits), hits};
}

}  // namespace oracle
