#pragma once

#include "cone/core.hpp"
#include "cone/numerics.hpp"

#include <optional>
#include <vector>

namespace cone {

/// p / q approximating a real number, with |x - p/q|.
struct RationalApprox {
    long p = 0;
    long q = 1;
    double error = 0.0;
};

/// Continued-fraction convergents p/q of x (x >= 0) with q <= q_max, in order.
std::vector<RationalApprox> convergents(double x, long q_max);

/// Smallest-denominator convergent with |x - p/q| <= tol * max(1, |x|), if any has q <= q_max.
std::optional<RationalApprox> rational_approximation(double x, long q_max = 64, double tol = 1e-9);

/// What counts as "rational" for a measured frequency ratio.
struct RationalityOptions {
    long q_max = 64;
    double tolerance = 1e-9;
    friend bool operator==(const RationalityOptions&, const RationalityOptions&) = default;
};

struct ActionData {
    double I1 = 0.0;  ///< = J
    double I2 = 0.0;  ///< radial action
    double omega1 = 0.0;
    double omega2 = 0.0;
    double ratio = 0.0;  ///< omega1 / omega2
    std::optional<RationalApprox> rational_approx;
};

/// I2 = (1/pi) * integral_{r_min}^{r_max} sqrt(2m (E - U_eff(r))) dr, for any potential.
double action_I2(const Params& params, double E, double J, const numerics::QuadratureOptions& opts = {});

/// Closed-form H(I1, I2) for the Kepler and oscillator potentials (|I1| enters).
double hamiltonian_from_actions(const Params& params, double I1, double I2);

/// Actions and frequencies of the (E, J) torus: omega2 = 2 pi / T_r and omega1 = omega2 * delta_phi / pi.
/// Circular orbits use the small-oscillation limit.
ActionData frequencies(const Params& params, double E, double J, const RationalityOptions& rat = {},
                       const numerics::QuadratureOptions& opts = {});

/// omega1 / omega2 = n1 / n2 in lowest terms; the orbit then closes after n2 radial periods
/// and n1 turns of phi.
struct ClosurePrediction {
    long n1 = 0;
    long n2 = 0;
};

std::optional<ClosurePrediction> predict_closure(const Params& params, double E, double J,
                                                 const RationalityOptions& rat = {},
                                                 const numerics::QuadratureOptions& opts = {});

}  // namespace cone
