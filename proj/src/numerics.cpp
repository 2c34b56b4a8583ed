#include "predmm/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace predmm::numerics {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvSqrt2 = 0.70710678118654752440;

std::string bracket_message(double lo, double hi, double f_lo, double f_hi) {
    std::ostringstream os;
    os.precision(17);
    os << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << f_lo << ", f(hi)=" << f_hi;
    return os.str();
}

// Mills ratio (1 - Phi(z)) / phi(z) by backward evaluation of Laplace's
// continued fraction. Only used for z >= 8 where 200 terms are plenty.
double mills_ratio_cf(double z) {
    double tail = z;
    for (int n = 200; n >= 1; --n) tail = z + n / tail;
    return 1.0 / tail;
}

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussLegendre make_gauss_legendre(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

const GaussLegendre& gauss_legendre(int n) {
    thread_local std::unordered_map<int, GaussLegendre> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

class PanelIntegrator {
public:
    PanelIntegrator(const std::function<double(double)>& f, const GaussLegendre& rule)
        : f_(f), rule_(rule) {}

    double panel(double a, double b) const {
        double half = 0.5 * (b - a);
        double mid = 0.5 * (a + b);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule_.nodes.size(); ++i)
            sum += rule_.weights[i] * f_(mid + half * rule_.nodes[i]);
        return sum * half;
    }

    double adaptive(double a, double b, double whole, double tol, int depth) const {
        double m = 0.5 * (a + b);
        double left = panel(a, m);
        double right = panel(m, b);
        double refined = left + right;
        double diff = std::abs(refined - whole);
        // the second test stops refinement once only rounding noise is left
        if (depth >= kMaxDepth || diff <= tol || diff <= kRoundoff * (std::abs(left) + std::abs(right)))
            return refined;
        return adaptive(a, m, left, 0.5 * tol, depth + 1) + adaptive(m, b, right, 0.5 * tol, depth + 1);
    }

private:
    static constexpr int kMaxDepth = 16;
    static constexpr double kRoundoff = 256.0 * std::numeric_limits<double>::epsilon();
    const std::function<double(double)>& f_;
    const GaussLegendre& rule_;
};

}  // namespace

NoBracket::NoBracket(double lo, double hi, double f_lo, double f_hi)
    : std::domain_error(bracket_message(lo, hi, f_lo, f_hi)) {}

void QuadratureSpec::validate() const {
    if (node_count < 16) throw std::invalid_argument("QuadratureSpec.node_count must be >= 16");
    if (!(half_width_sigmas >= 6.0))
        throw std::invalid_argument("QuadratureSpec.half_width_sigmas must be >= 6");
}

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_sf(double x) {
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    return 0.5 * std::erfc(x * kInvSqrt2);
}

double hazard(double z) {
    if (z >= 8.0) return 1.0 / mills_ratio_cf(z);
    return std_normal_pdf(z) / std_normal_sf(z);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("find_root: tol must be positive");
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (std::signbit(f_lo) == std::signbit(f_hi) || std::isnan(f_lo) || std::isnan(f_hi))
        throw NoBracket(lo, hi, f_lo, f_hi);
    while (std::abs(hi - lo) > tol) {
        double mid = lo + 0.5 * (hi - lo);
        if (mid == lo || mid == hi) break;
        double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

double integrate_gaussian_weighted(const std::function<double(double)>& g, double center,
                                   double scale, const QuadratureSpec& spec) {
    spec.validate();
    if (!(scale > 0)) throw std::invalid_argument("integrate_gaussian_weighted: scale must be positive");

    // Integrate in standardized units u = (v - center) / scale.
    const std::function<double(double)> integrand = [&](double u) {
        return std_normal_pdf(u) * g(center + scale * u);
    };
    const auto& rule = gauss_legendre(spec.node_count);
    PanelIntegrator integrator(integrand, rule);

    const double h = spec.half_width_sigmas;
    // Start from four panels so narrow features away from the center are seen.
    double total = 0.0;
    std::vector<std::pair<double, double>> panels;
    for (int i = 0; i < 4; ++i) panels.emplace_back(-h + i * h / 2.0, -h + (i + 1) * h / 2.0);
    std::vector<double> coarse;
    for (auto [a, b] : panels) {
        coarse.push_back(integrator.panel(a, b));
        total += coarse.back();
    }
    constexpr double kRelTol = 1e-13;
    double tol = std::max(kRelTol * std::abs(total), 1e-300);
    double result = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i)
        result += integrator.adaptive(panels[i].first, panels[i].second, coarse[i], tol / 4.0, 0);
    return result;
}

}  // namespace predmm::numerics
