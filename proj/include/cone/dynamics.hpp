#pragma once

#include "cone/core.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace cone {

/// H = p_r^2 / 2m + J^2 / (2 m s^2 r^2) + V(r)
double energy(const Params& params, const PhasePoint& pt);

/// U_eff(r) = J^2 / (2 m s^2 r^2) + V(r)
double effective_potential(const Params& params, double J, double r);
double effective_potential_d1(const Params& params, double J, double r);
double effective_potential_d2(const Params& params, double J, double r);

/// U_eff(r + d) - U_eff(r) without cancellation for small |d|.
double effective_potential_difference(const Params& params, double J, double r, double d);

/// Local minimum of the effective potential.
struct EffectiveMinimum {
    double r_c = 0.0;
    double U0 = 0.0;
};

/// All local minima of U_eff found by a sign-change scan of U_eff' over a geometric
/// grid on [1e-6, 1e6], each polished by bracketed root finding.
std::vector<EffectiveMinimum> effective_minima(const Params& params, double J);

/// The unique minimum; StructuralError when there is none or more than one.
EffectiveMinimum effective_minimum(const Params& params, double J);

struct TurningPoints {
    double r_min = 0.0;
    double r_max = 0.0;
    bool circular() const noexcept { return r_min == r_max; }
};

/// Roots of U_eff(r) = E around the minimum. Throws ForbiddenError for E below the
/// minimum and UnboundedError when the outer root does not exist.
TurningPoints turning_points(const Params& params, double E, double J);

/// One Strang-split leapfrog step of the reduced radial system; J is carried unchanged
/// and phi advances by dt J / (m s^2 r_mid^2) with r_mid the drift midpoint.
PhasePoint step(const Params& params, const PhasePoint& pt, double dt);

/// Sampled solution of the reduced flow.
struct Trajectory {
    Params params;
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::vector<double> phi_unwrapped;
    std::vector<double> series_H;
    std::vector<double> series_J;

    std::size_t size() const noexcept { return times.size(); }
};

/// Leapfrog from pt0 for n_steps of size dt, recording every sample_every-th state
/// (and the initial one). TipCollisionError carries the failing step index.
Trajectory integrate(const Params& params, const PhasePoint& pt0, double dt, std::size_t n_steps,
                     std::size_t sample_every = 1);

/// First return of the orbit to its initial phase-space point.
struct Closure {
    double time = 0.0;
    int radial_periods = 0;
    long windings = 0;  ///< net number of turns of phi at closure
};

/// Scan the trajectory for returns of (r, p_r) to the initial state (one per radial period)
/// and report the first one where phi has also advanced by a whole number of turns.
/// Distances are normalized by the orbit amplitude of each coordinate (2 pi for phi);
/// states between samples come from cubic Hermite interpolation using the flow.
/// Circular orbits and trajectories without a closure give nullopt.
std::optional<Closure> detect_closure(const Trajectory& traj, double tol = 1e-6);

/// Pericentre / apocentre passage located between samples.
struct Apsis {
    double time = 0.0;
    double r = 0.0;
    double phi_unwrapped = 0.0;
    bool pericentre = false;
};

/// All apsides (zeros of p_r) along the trajectory, in time order.
std::vector<Apsis> find_apsides(const Trajectory& traj);

}  // namespace cone
