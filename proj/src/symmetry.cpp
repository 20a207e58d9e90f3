#include "cone/symmetry.hpp"

#include "cone/dynamics.hpp"
#include "cone/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <variant>

namespace cone {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kZeroFloor = 1e-12;

IntegralKind integral_kind(const Params& params) {
    if (std::holds_alternative<Kepler>(params.potential()))
        return IntegralKind::kepler;
    if (std::holds_alternative<Oscillator>(params.potential()))
        return IntegralKind::oscillator;
    throw StructuralError("superintegrable structure exists only for Kepler and oscillator potentials, not " +
                          describe(params.potential()));
}

ABPair ab_pair(const Params& params, const PhasePoint& pt) {
    return integral_kind(params) == IntegralKind::kepler ? kepler_AB(params, pt) : oscillator_AB(params, pt);
}

/// Phase multiplier: the Kepler integral rotates with e^{i s phi}, the oscillator one with e^{2 i s phi}.
double phase_factor(IntegralKind kind) {
    return kind == IntegralKind::kepler ? 1.0 : 2.0;
}

Complex ipow(Complex z, int n) {
    Complex out{1.0, 0.0};
    for (int i = 0; i < n; ++i)
        out *= z;
    return out;
}

/// Perturbable coordinate of a phase point.
enum class Coord { r, phi, p_r, J };

PhasePoint shifted(const PhasePoint& pt, Coord c, double d) {
    switch (c) {
        case Coord::r:
            if (!(pt.r() + d > 0.0))
                throw DomainError("finite-difference stencil crosses r <= 0");
            return PhasePoint(pt.r() + d, pt.phi(), pt.p_r(), pt.J());
        case Coord::phi: return PhasePoint(pt.r(), pt.phi() + d, pt.p_r(), pt.J());
        case Coord::p_r: return PhasePoint(pt.r(), pt.phi(), pt.p_r() + d, pt.J());
        case Coord::J: return PhasePoint(pt.r(), pt.phi(), pt.p_r(), pt.J() + d);
    }
    return pt;
}

double coordinate(const PhasePoint& pt, Coord c) {
    switch (c) {
        case Coord::r: return pt.r();
        case Coord::phi: return pt.phi();
        case Coord::p_r: return pt.p_r();
        case Coord::J: return pt.J();
    }
    return 0.0;
}

Complex central_difference(const PhaseFunction& f, const PhasePoint& pt, Coord c, double step) {
    return (f(shifted(pt, c, step)) - f(shifted(pt, c, -step))) / (2.0 * step);
}

/// Gradient in the order (r, phi, p_r, J) at step h (scaled per coordinate).
std::array<Complex, 4> gradient(const PhaseFunction& f, const PhasePoint& pt, double h) {
    std::array<Complex, 4> g;
    constexpr std::array<Coord, 4> coords{Coord::r, Coord::phi, Coord::p_r, Coord::J};
    for (std::size_t i = 0; i < 4; ++i) {
        const double step = h * std::max(1.0, std::abs(coordinate(pt, coords[i])));
        g[i] = central_difference(f, pt, coords[i], step);
    }
    return g;
}

Complex bracket_from_gradients(const std::array<Complex, 4>& df, const std::array<Complex, 4>& dg) {
    // indices: 0 r, 1 phi, 2 p_r, 3 J
    return df[0] * dg[2] - df[2] * dg[0] + df[1] * dg[3] - df[3] * dg[1];
}

}  // namespace

ABPair kepler_AB(const Params& params, const PhasePoint& pt) {
    const auto* k = std::get_if<Kepler>(&params.potential());
    if (!k)
        throw StructuralError("kepler_AB needs a Kepler potential");
    const double m = params.mass();
    const double s = params.scale();
    const double J = pt.J();
    return {J * J / (m * s * s * pt.r()) - k->kappa, J * pt.p_r() / (m * s)};
}

ABPair oscillator_AB(const Params& params, const PhasePoint& pt) {
    if (!std::holds_alternative<Oscillator>(params.potential()))
        throw StructuralError("oscillator_AB needs an oscillator potential");
    const double m = params.mass();
    const double s = params.scale();
    const double J = pt.J();
    const double r = pt.r();
    return {J * J / (m * s * s * r * r) - energy(params, pt), pt.p_r() * J / (m * s * r)};
}

ComplexIntegral local_C(const Params& params, const PhasePoint& pt) {
    return local_C_at(params, pt, pt.phi());
}

ComplexIntegral local_C_at(const Params& params, const PhasePoint& pt, double phi) {
    const auto kind = integral_kind(params);
    const auto [A, B] = ab_pair(params, pt);
    const double s = params.scale();
    const Complex phase = std::polar(1.0, phase_factor(kind) * s * phi);
    ComplexIntegral out;
    out.value = Complex(A, -B) * phase;
    out.kind = kind;
    out.n = 1;
    out.k = 1;
    // the phase returns to itself under phi -> phi + 2 pi only if (phase factor) * s is an integer
    const double turns = phase_factor(kind) * s;
    out.single_valued = turns == std::floor(turns);
    return out;
}

ComplexIntegral global_Z(const Params& params, const PhasePoint& pt) {
    return global_Z_at(params, pt, pt.phi());
}

ComplexIntegral global_Z_at(const Params& params, const PhasePoint& pt, double phi) {
    const auto& ratio = params.geometry().ratio();
    if (!ratio)
        throw IrrationalScaleError(
            "irrational s: only the local integral C is available (no single-valued power of C exists)");
    const auto kind = integral_kind(params);
    const auto [A, B] = ab_pair(params, pt);
    // k phi is taken modulo 2 pi on the reduced angle, so the phase is single-valued by construction
    const double angle = phase_factor(kind) * ratio->k * reduce_angle(phi);
    ComplexIntegral out;
    out.value = ipow(Complex(A, -B), ratio->n) * std::polar(1.0, angle);
    out.kind = kind;
    out.n = ratio->n;
    out.k = ratio->k;
    out.single_valued = true;
    return out;
}

double norm_identity_residual(const Params& params, const PhasePoint& pt) {
    const auto kind = integral_kind(params);
    const auto [A, B] = ab_pair(params, pt);
    const double lhs = A * A + B * B;
    const double m = params.mass();
    const double s = params.scale();
    const double J = pt.J();
    const double H = energy(params, pt);
    double rhs;
    if (kind == IntegralKind::kepler) {
        const double kappa = std::get<Kepler>(params.potential()).kappa;
        rhs = 2.0 * H * J * J / (m * s * s) + kappa * kappa;
    } else {
        const double w = std::get<Oscillator>(params.potential()).omega;
        rhs = H * H - w * w * J * J / (s * s);
    }
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

BracketEstimate poisson_bracket_estimate(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& pt,
                                         double h) {
    if (!(h > 0.0))
        throw DomainError("finite-difference step must be positive");
    const Complex coarse = bracket_from_gradients(gradient(f, pt, h), gradient(g, pt, h));
    const Complex fine = bracket_from_gradients(gradient(f, pt, 0.5 * h), gradient(g, pt, 0.5 * h));
    BracketEstimate est;
    est.raw = fine;
    est.value = (4.0 * fine - coarse) / 3.0;
    const double scale = std::max({std::abs(est.value), std::abs(est.raw), kZeroFloor});
    est.richardson_agrees = std::abs(est.value - est.raw) <= 1e-6 * scale;
    return est;
}

Complex poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& pt, double h) {
    return poisson_bracket_estimate(f, g, pt, h).value;
}

const BracketEntry& BracketReport::at(const std::string& name) const {
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.bracket == name; });
    if (it == entries.end())
        throw StructuralError("bracket report has no entry '" + name + "'");
    return *it;
}

BracketReport verify_w_algebra(const Params& params, const PhasePoint& pt, double h) {
    const auto kind = integral_kind(params);
    const auto& ratio = params.geometry().ratio();
    if (!ratio)
        throw IrrationalScaleError("irrational s: the W-algebra needs a single-valued Z");
    const int k = ratio->k;
    const int n = ratio->n;
    const double m = params.mass();
    const double c = phase_factor(kind);

    const PhaseFunction fJ = [](const PhasePoint& p) { return Complex(p.J(), 0.0); };
    const PhaseFunction fH = [&](const PhasePoint& p) { return Complex(energy(params, p), 0.0); };
    const PhaseFunction fZ = [&](const PhasePoint& p) { return global_Z(params, p).value; };
    const PhaseFunction fZbar = [&](const PhasePoint& p) { return std::conj(global_Z(params, p).value); };

    const Complex Z = fZ(pt);
    const Complex Zbar = std::conj(Z);
    const double J = pt.J();
    const double H = energy(params, pt);
    const double n3 = static_cast<double>(n) * n * n;

    BracketReport report;
    report.h = h;
    report.kind = kind;
    report.k = k;
    report.n = n;

    auto add = [&](std::string name, const BracketEstimate& est, Complex expected, double zero_scale = 0.0) {
        BracketEntry e;
        e.bracket = std::move(name);
        e.value = est.value;
        e.expected = expected;
        e.abs_err = std::abs(est.value - expected);
        const double denom = expected == Complex{} ? std::max(zero_scale, kZeroFloor)
                                                   : std::max(std::abs(expected), kZeroFloor);
        e.rel_err = e.abs_err / denom;
        e.richardson_agrees = est.richardson_agrees;
        report.entries.push_back(std::move(e));
    };

    const auto jz = poisson_bracket_estimate(fJ, fZ, pt, h);
    const auto jzbar = poisson_bracket_estimate(fJ, fZbar, pt, h);
    const auto zzbar = poisson_bracket_estimate(fZ, fZbar, pt, h);
    const auto hz = poisson_bracket_estimate(fH, fZ, pt, h);
    const auto hj = poisson_bracket_estimate(fH, fJ, pt, h);

    add("{J,Z}", jz, c * k * Z);
    add("{J,Z} canonical phase", jz, -kI * c * static_cast<double>(k) * Z);
    add("{J,Zbar}", jzbar, -c * k * Zbar);
    add("{J,Zbar} canonical phase", jzbar, kI * c * static_cast<double>(k) * Zbar);

    if (kind == IntegralKind::kepler) {
        const double kappa = std::get<Kepler>(params.potential()).kappa;
        const double pre = 4.0 * n3 / (m * k) * J * H;
        const double printed = pre * std::pow(2.0 * n * n * J * J / (m * k * k) + kappa * kappa, n - 1);
        const double h_inside = pre * std::pow(2.0 * n * n * J * J * H / (m * k * k) + kappa * kappa, n - 1);
        add("{Z,Zbar} printed", zzbar, kI * printed);
        add("{Z,Zbar} printed, opposite sign", zzbar, -kI * printed);
        add("{Z,Zbar} H inside power", zzbar, kI * h_inside);
        add("{Z,Zbar} H inside power, opposite sign", zzbar, -kI * h_inside);
    } else {
        const double w = std::get<Oscillator>(params.potential()).omega;
        const double printed =
            -4.0 * n3 / k * w * w * J * std::pow(H * H - w * w * n * n * J * J / (static_cast<double>(k) * k), n - 1);
        add("{Z,Zbar} printed", zzbar, kI * printed);
        add("{Z,Zbar} printed, opposite sign", zzbar, -kI * printed);
    }

    add("{H,Z}", hz, Complex{}, std::abs(Z));
    add("{H,J}", hj, Complex{}, std::abs(J));
    return report;
}

}  // namespace cone
