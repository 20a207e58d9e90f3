#pragma once

#include "cone/errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace cone::numerics {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rules are computed once per order and cached; the reference stays valid for the program lifetime.
const GaussLegendreRule& gauss_legendre(int order);

struct QuadratureOptions {
    /// stop once two successive order-doublings agree to this relative tolerance
    double tolerance = 1e-10;
    int min_order = 16;
    /// at most this many doublings beyond min_order
    int max_refinements = 8;
    friend bool operator==(const QuadratureOptions&, const QuadratureOptions&) = default;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  ///< relative change at the last doubling
    int order = 0;
    bool converged = false;
};

/// Integrate a smooth f over [a, b] with Gauss-Legendre rules of doubling order.
template <class F>
QuadratureResult integrate_doubling(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    auto apply = [&](int order) {
        const auto& rule = gauss_legendre(order);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
        return half * sum;
    };
    QuadratureResult res;
    int order = opts.min_order;
    double prev = apply(order);
    for (int k = 0; k < opts.max_refinements; ++k) {
        order *= 2;
        const double cur = apply(order);
        const double scale = std::max(std::abs(cur), std::numeric_limits<double>::min());
        res.value = cur;
        res.order = order;
        res.error_estimate = std::abs(cur - prev) / scale;
        if (res.error_estimate < opts.tolerance) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    if (opts.max_refinements <= 0) {
        res.value = prev;
        res.order = order;
        res.error_estimate = std::numeric_limits<double>::infinity();
    }
    return res;
}

/// Derivative-free bracketing root finder (TOMS 748) with a relative x-tolerance.
/// f(lo) and f(hi) must differ in sign (or one of them vanish).
template <class F>
double find_root(F&& f, double lo, double hi, double rel_tol = 1e-14, std::uintmax_t max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw DomainError("find_root: interval does not bracket a sign change");
    auto tol = [rel_tol](double x, double y) {
        return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
    };
    std::uintmax_t iters = max_iter;
    auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (bracket.first + bracket.second);
}

/// Least-squares slope of y against x (with intercept).
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace cone::numerics
