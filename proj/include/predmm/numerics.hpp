#pragma once

#include <functional>
#include <stdexcept>

namespace predmm::numerics {

class NoBracket : public std::domain_error {
public:
    NoBracket(double lo, double hi, double f_lo, double f_hi);
};

/// Integration settings for integrate_gaussian_weighted. `node_count` is the
/// Gauss-Legendre order used on each panel; panels are bisected adaptively
/// across center +/- half_width_sigmas * scale.
struct QuadratureSpec {
    int node_count = 64;
    double half_width_sigmas = 8.0;

    void validate() const;
    friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

double std_normal_pdf(double x);

/// Phi(x). Accepts +/-infinity.
double std_normal_cdf(double x);

/// 1 - Phi(x), accurate in the far right tail.
double std_normal_sf(double x);

/// phi(z) / (1 - Phi(z)), the inverse Mills ratio. Uses a continued fraction
/// for large z so it never forms 0/0.
double hazard(double z);

/// Bisection on a sign-changing bracket. Stops when the bracket is narrower
/// than `tol` and returns its midpoint.
double find_root(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Integral of N(v; center, scale) * g(v) over center +/- spec.half_width_sigmas * scale.
double integrate_gaussian_weighted(const std::function<double(double)>& g, double center,
                                   double scale, const QuadratureSpec& spec = {});

}  // namespace predmm::numerics
