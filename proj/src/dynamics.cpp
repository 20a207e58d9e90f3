#include "cone/dynamics.hpp"

#include "cone/errors.hpp"
#include "cone/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cone {

namespace {

/// J^2 / (m s^2), the coefficient of the centrifugal term (times 1/(2 r^2)).
double centrifugal_coefficient(const Params& params, double J) {
    const double s = params.scale();
    return J * J / (params.mass() * s * s);
}

constexpr double kScanMin = 1e-6;
constexpr double kScanMax = 1e6;
constexpr int kScanPoints = 1201;

struct LeapfrogResult {
    double r;
    double p_r;
    double dphi;
};

LeapfrogResult leapfrog(const Params& params, double r, double p_r, double J, double dt) {
    const double m = params.mass();
    const double s = params.scale();
    const double p_half = p_r - 0.5 * dt * effective_potential_d1(params, J, r);
    const double r_new = r + dt * p_half / m;
    if (!(r_new > 0.0) || !std::isfinite(r_new))
        throw TipCollisionError("step reached the cone tip (r <= 0); reduce dt", 0);
    const double r_mid = 0.5 * (r + r_new);
    const double dphi = dt * J / (m * s * s * r_mid * r_mid);
    const double p_new = p_half - 0.5 * dt * effective_potential_d1(params, J, r_new);
    return {r_new, p_new, dphi};
}

/// Cubic Hermite interpolation on [t0, t1] with values y and slopes dy.
struct Hermite {
    double t0, h;
    double y0, y1, d0, d1;

    double operator()(double t) const {
        const double u = (t - t0) / h;
        const double u2 = u * u;
        const double u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * y1 +
               (u3 - u2) * h * d1;
    }
};

/// Interpolants of r, p_r and unwrapped phi between samples i and i+1.
struct SegmentInterpolant {
    Hermite r, p, phi;

    SegmentInterpolant(const Trajectory& traj, std::size_t i) {
        const Params& prm = traj.params;
        const double m = prm.mass();
        const double s = prm.scale();
        const auto& a = traj.points[i];
        const auto& b = traj.points[i + 1];
        const double J = a.J();
        const double t0 = traj.times[i];
        const double h = traj.times[i + 1] - t0;
        r = Hermite{t0, h, a.r(), b.r(), a.p_r() / m, b.p_r() / m};
        p = Hermite{t0, h, a.p_r(), b.p_r(), -effective_potential_d1(prm, J, a.r()),
                    -effective_potential_d1(prm, J, b.r())};
        phi = Hermite{t0, h, traj.phi_unwrapped[i], traj.phi_unwrapped[i + 1],
                      J / (m * s * s * a.r() * a.r()), J / (m * s * s * b.r() * b.r())};
    }
};

double wrap_pi(double a) {
    return std::remainder(a, kTwoPi);
}

}  // namespace

double energy(const Params& params, const PhasePoint& pt) {
    return pt.p_r() * pt.p_r() / (2.0 * params.mass()) + effective_potential(params, pt.J(), pt.r());
}

double effective_potential(const Params& params, double J, double r) {
    if (!(r > 0.0))
        throw DomainError("effective potential needs r > 0");
    return 0.5 * centrifugal_coefficient(params, J) / (r * r) + params.V(r);
}

double effective_potential_d1(const Params& params, double J, double r) {
    if (!(r > 0.0))
        throw DomainError("effective potential needs r > 0");
    return -centrifugal_coefficient(params, J) / (r * r * r) + params.dV(r);
}

double effective_potential_d2(const Params& params, double J, double r) {
    if (!(r > 0.0))
        throw DomainError("effective potential needs r > 0");
    return 3.0 * centrifugal_coefficient(params, J) / (r * r * r * r) + params.d2V(r);
}

double effective_potential_difference(const Params& params, double J, double r, double d) {
    const double rd = r + d;
    if (!(r > 0.0) || !(rd > 0.0))
        throw DomainError("effective potential needs r > 0");
    // 1/(r+d)^2 - 1/r^2 = -d (2r + d) / (r^2 (r+d)^2)
    const double centrifugal = -0.5 * centrifugal_coefficient(params, J) * d * (2.0 * r + d) / (r * r * rd * rd);
    return centrifugal + potential_difference(params.potential(), params.mass(), r, d);
}

std::vector<EffectiveMinimum> effective_minima(const Params& params, double J) {
    std::vector<EffectiveMinimum> out;
    const double ratio = std::pow(kScanMax / kScanMin, 1.0 / (kScanPoints - 1));
    double r_prev = kScanMin;
    double d_prev = effective_potential_d1(params, J, r_prev);
    for (int i = 1; i < kScanPoints; ++i) {
        const double r = kScanMin * std::pow(ratio, i);
        const double d = effective_potential_d1(params, J, r);
        if (d_prev < 0.0 && d >= 0.0) {
            const double rc = numerics::find_root([&](double x) { return effective_potential_d1(params, J, x); },
                                                  r_prev, r, 1e-15);
            out.push_back({rc, effective_potential(params, J, rc)});
        }
        r_prev = r;
        d_prev = d;
    }
    return out;
}

EffectiveMinimum effective_minimum(const Params& params, double J) {
    const auto minima = effective_minima(params, J);
    if (minima.empty())
        throw StructuralError("effective potential has no minimum for " + describe(params.potential()) +
                              " at J = " + std::to_string(J));
    if (minima.size() > 1)
        throw StructuralError("effective potential has a non-unique minimum");
    return minima.front();
}

TurningPoints turning_points(const Params& params, double E, double J) {
    if (!std::isfinite(E))
        throw DomainError("energy must be finite");
    const auto [rc, U0] = effective_minimum(params, J);
    const double scale = std::max({std::abs(U0), 0.5 * centrifugal_coefficient(params, J) / (rc * rc),
                                   std::numeric_limits<double>::min()});
    if (std::abs(E - U0) <= 1e-13 * scale)
        return {rc, rc};
    if (E < U0)
        throw ForbiddenError("energy " + std::to_string(E) + " lies below the effective-potential minimum " +
                             std::to_string(U0));

    auto f = [&](double r) { return effective_potential(params, J, r) - E; };

    double lo = rc;
    for (int k = 0; f(lo) <= 0.0; ++k) {
        if (k > 2000)
            throw ForbiddenError("no inner turning point: the orbit reaches the tip");
        lo *= 0.5;
    }
    double hi = rc;
    for (int k = 0; f(hi) <= 0.0; ++k) {
        if (k > 200 || !std::isfinite(hi))
            throw UnboundedError("no outer turning point: motion at E = " + std::to_string(E) + " is unbounded");
        hi *= 2.0;
    }
    const double r_min = numerics::find_root(f, lo, rc, 1e-15);
    const double r_max = numerics::find_root(f, rc, hi, 1e-15);
    return {r_min, r_max};
}

PhasePoint step(const Params& params, const PhasePoint& pt, double dt) {
    if (dt == 0.0 || !std::isfinite(dt))
        throw DomainError("time step must be non-zero and finite");
    const auto res = leapfrog(params, pt.r(), pt.p_r(), pt.J(), dt);
    return PhasePoint(res.r, pt.phi() + res.dphi, res.p_r, pt.J());
}

Trajectory integrate(const Params& params, const PhasePoint& pt0, double dt, std::size_t n_steps,
                     std::size_t sample_every) {
    if (n_steps < 1 || sample_every < 1)
        throw DomainError("integrate needs n_steps >= 1 and sample_every >= 1");
    if (dt == 0.0 || !std::isfinite(dt))
        throw DomainError("time step must be non-zero and finite");

    Trajectory traj{params, {}, {}, {}, {}, {}};
    const std::size_t n_samples = n_steps / sample_every + 1;
    traj.times.reserve(n_samples);
    traj.points.reserve(n_samples);
    traj.phi_unwrapped.reserve(n_samples);
    traj.series_H.reserve(n_samples);
    traj.series_J.reserve(n_samples);

    auto record = [&](double t, const PhasePoint& pt, double phi) {
        traj.times.push_back(t);
        traj.points.push_back(pt);
        traj.phi_unwrapped.push_back(phi);
        traj.series_H.push_back(energy(params, pt));
        traj.series_J.push_back(pt.J());
    };

    const double J = pt0.J();
    double r = pt0.r();
    double p = pt0.p_r();
    double phi = pt0.phi();
    record(0.0, pt0, phi);
    for (std::size_t i = 1; i <= n_steps; ++i) {
        LeapfrogResult res{};
        try {
            res = leapfrog(params, r, p, J, dt);
        } catch (const TipCollisionError& e) {
            throw TipCollisionError("step " + std::to_string(i) + ": " + e.what(), i);
        }
        r = res.r;
        p = res.p_r;
        phi += res.dphi;
        if (i % sample_every == 0)
            record(static_cast<double>(i) * dt, PhasePoint(r, phi, p, J), phi);
    }
    return traj;
}

std::optional<Closure> detect_closure(const Trajectory& traj, double tol) {
    if (traj.size() < 3)
        return std::nullopt;
    const Params& params = traj.params;
    const PhasePoint& p0 = traj.points.front();
    const double J = p0.J();
    if (J == 0.0)
        throw DomainError("closure detection needs J != 0");

    const double rc = effective_minimum(params, J).r_c;
    const auto [rmin_it, rmax_it] =
        std::minmax_element(traj.points.begin(), traj.points.end(),
                            [](const PhasePoint& a, const PhasePoint& b) { return a.r() < b.r(); });
    const double amp_r = 0.5 * (rmax_it->r() - rmin_it->r());
    double amp_p = 0.0;
    for (const auto& pt : traj.points)
        amp_p = std::max(amp_p, std::abs(pt.p_r()));
    if (amp_r <= 1e-12 * rc || amp_p == 0.0)
        return std::nullopt;

    // Polar angle around (r_c, 0) in the scaled (r, p_r) plane; the radial loop is
    // star-shaped about the minimum, so this angle winds once per radial period.
    auto radial_angle = [&](double r, double p) { return std::atan2(-p / amp_p, (r - rc) / amp_r); };

    const double psi0 = radial_angle(p0.r(), p0.p_r());
    double psi_prev = psi0;
    double wound_prev = 0.0;
    int next_return = 1;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const auto& b = traj.points[i + 1];
        const double psi_b = radial_angle(b.r(), b.p_r());
        const double wound_b = wound_prev + wrap_pi(psi_b - psi_prev);
        const double target = kTwoPi * next_return;
        if (std::abs(wound_b) >= target) {
            const SegmentInterpolant seg(traj, i);
            const double sign = wound_b >= 0.0 ? 1.0 : -1.0;
            const double psi_a = psi_prev;
            const double wound_a = wound_prev;
            auto g = [&](double t) {
                const double w = wound_a + wrap_pi(radial_angle(seg.r(t), seg.p(t)) - psi_a);
                return sign * w - target;
            };
            const double t_star = numerics::find_root(g, traj.times[i], traj.times[i + 1], 1e-15);
            const double r_star = seg.r(t_star);
            const double p_star = seg.p(t_star);
            const double turns = (seg.phi(t_star) - traj.phi_unwrapped.front()) / kTwoPi;
            const double d_r = std::abs(r_star - p0.r()) / amp_r;
            const double d_p = std::abs(p_star - p0.p_r()) / amp_p;
            const double d_phi = std::abs(turns - std::round(turns));
            if (d_r <= tol && d_p <= tol && d_phi <= tol && std::round(turns) != 0.0)
                return Closure{t_star, next_return, std::lround(turns)};
            ++next_return;
        }
        psi_prev = psi_b;
        wound_prev = wound_b;
    }
    return std::nullopt;
}

std::vector<Apsis> find_apsides(const Trajectory& traj) {
    std::vector<Apsis> out;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double pa = traj.points[i].p_r();
        const double pb = traj.points[i + 1].p_r();
        const bool to_peri = pa < 0.0 && pb >= 0.0;
        const bool to_apo = pa > 0.0 && pb <= 0.0;
        if (!to_peri && !to_apo)
            continue;
        const SegmentInterpolant seg(traj, i);
        const double t = numerics::find_root([&](double x) { return seg.p(x); }, traj.times[i], traj.times[i + 1],
                                             1e-15);
        out.push_back(Apsis{t, seg.r(t), seg.phi(t), to_peri});
    }
    return out;
}

}  // namespace cone
