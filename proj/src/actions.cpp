#include "cone/actions.hpp"

#include "cone/bertrand.hpp"
#include "cone/dynamics.hpp"
#include "cone/errors.hpp"

#include <cmath>
#include <limits>
#include <variant>

namespace cone {

std::vector<RationalApprox> convergents(double x, long q_max) {
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError("convergents need a finite non-negative number");
    std::vector<RationalApprox> out;
    // h_{-1}/k_{-1} = 1/0, h_{-2}/k_{-2} = 0/1
    long h_prev = 1, k_prev = 0;
    long h_prev2 = 0, k_prev2 = 1;
    double rest = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double a_real = std::floor(rest);
        if (a_real > static_cast<double>(std::numeric_limits<long>::max() / 4))
            break;
        const long a = static_cast<long>(a_real);
        const long h = a * h_prev + h_prev2;
        const long k = a * k_prev + k_prev2;
        if (k > q_max)
            break;
        out.push_back({h, k, std::abs(x - static_cast<double>(h) / static_cast<double>(k))});
        const double frac = rest - a_real;
        if (frac == 0.0)
            break;
        rest = 1.0 / frac;
        h_prev2 = h_prev;
        k_prev2 = k_prev;
        h_prev = h;
        k_prev = k;
    }
    return out;
}

std::optional<RationalApprox> rational_approximation(double x, long q_max, double tol) {
    const double sign = x < 0.0 ? -1.0 : 1.0;
    const double bound = tol * std::max(1.0, std::abs(x));
    for (auto c : convergents(std::abs(x), q_max)) {
        if (c.error <= bound) {
            c.p = static_cast<long>(sign) * c.p;
            return c;
        }
    }
    return std::nullopt;
}

double action_I2(const Params& params, double E, double J, const numerics::QuadratureOptions& opts) {
    const auto tp = turning_points(params, E, J);
    if (tp.circular())
        return 0.0;
    const double m = params.mass();
    const auto q = radial_integral(
        params, J, tp, [&](double, double gap) { return std::sqrt(2.0 * m * std::max(gap, 0.0)); }, opts);
    return q.value / kPi;
}

double hamiltonian_from_actions(const Params& params, double I1, double I2) {
    if (I2 < 0.0)
        throw DomainError("radial action must be non-negative");
    const double s = params.scale();
    const double m = params.mass();
    if (const auto* k = std::get_if<Kepler>(&params.potential())) {
        const double L = std::abs(I1) / s + I2;
        if (L == 0.0)
            throw DomainError("Kepler H(I) diverges at I1 = I2 = 0");
        return -m * k->kappa * k->kappa / (2.0 * L * L);
    }
    if (const auto* o = std::get_if<Oscillator>(&params.potential()))
        return o->omega * (std::abs(I1) / s + 2.0 * I2);
    throw StructuralError("no closed-form H(I) for " + describe(params.potential()));
}

ActionData frequencies(const Params& params, double E, double J, const RationalityOptions& rat,
                       const numerics::QuadratureOptions& opts) {
    ActionData out;
    out.I1 = J;
    out.I2 = action_I2(params, E, J, opts);
    try {
        const double T = radial_period(params, E, J, opts);
        const double dphi = apsidal_angle(params, E, J, opts).delta_phi;
        out.omega2 = kTwoPi / T;
        out.omega1 = out.omega2 * dphi / kPi;
    } catch (const DegenerateError&) {
        // circular: radial frequency from the curvature of U_eff, ratio from the harmonic limit
        const double rc = circular_orbit(params, J).r_c;
        out.I2 = 0.0;
        out.omega2 = std::sqrt(effective_potential_d2(params, J, rc) / params.mass());
        out.omega1 = out.omega2 * small_oscillation_freq(params, J).apsidal_limit / kPi;
    }
    out.ratio = out.omega1 / out.omega2;
    out.rational_approx = rational_approximation(out.ratio, rat.q_max, rat.tolerance);
    return out;
}

std::optional<ClosurePrediction> predict_closure(const Params& params, double E, double J,
                                                 const RationalityOptions& rat,
                                                 const numerics::QuadratureOptions& opts) {
    const auto data = frequencies(params, E, J, rat, opts);
    if (!data.rational_approx)
        return std::nullopt;
    return ClosurePrediction{data.rational_approx->p, data.rational_approx->q};
}

}  // namespace cone
