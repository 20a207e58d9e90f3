#pragma once

#include "cone/core.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace cone {

using Complex = std::complex<double>;

enum class IntegralKind { kepler, oscillator };

/// Value of the local integral C or its global power Z = C^n at one phase point.
struct ComplexIntegral {
    Complex value;
    IntegralKind kind = IntegralKind::kepler;
    int n = 1;  ///< power applied to C
    int k = 1;  ///< numerator of s = k/n (1 for a local C)
    bool single_valued = true;

    double re() const noexcept { return value.real(); }
    double im() const noexcept { return value.imag(); }
};

struct ABPair {
    double A = 0.0;
    double B = 0.0;
};

/// A = J^2 / (m s^2 r) - kappa,  B = J p_r / (m s).
ABPair kepler_AB(const Params& params, const PhasePoint& pt);

/// A = J^2 / (m s^2 r^2) - H,  B = p_r J / (m s r).
ABPair oscillator_AB(const Params& params, const PhasePoint& pt);

/// C = (A - iB) e^{i s phi} (Kepler) or (A - iB) e^{2 i s phi} (oscillator), using the
/// stored phi in [0, 2pi). Multi-valued on the cone unless s is an integer.
ComplexIntegral local_C(const Params& params, const PhasePoint& pt);

/// Local C at an explicit (unwrapped) angle, e.g. a trajectory's accumulated phi.
ComplexIntegral local_C_at(const Params& params, const PhasePoint& pt, double phi);

/// Z = (A - iB)^n e^{i k phi} (Kepler) or (A - iB)^n e^{2 i k phi} (oscillator) for s = k/n.
/// IrrationalScaleError when the geometry has no rational form.
ComplexIntegral global_Z(const Params& params, const PhasePoint& pt);

/// Z at an explicit angle; invariant under phi -> phi + 2 pi.
ComplexIntegral global_Z_at(const Params& params, const PhasePoint& pt, double phi);

/// |A^2 + B^2 - RHS| / max(|A^2 + B^2|, |RHS|, 1) with RHS = 2 H J^2 / (m s^2) + kappa^2 (Kepler)
/// or H^2 - omega^2 J^2 / s^2 (oscillator).
double norm_identity_residual(const Params& params, const PhasePoint& pt);

// ---------------------------------------------------------------------------
// Poisson brackets
// ---------------------------------------------------------------------------

using PhaseFunction = std::function<Complex(const PhasePoint&)>;

struct BracketEstimate {
    Complex value;  ///< Richardson-extrapolated bracket
    Complex raw;    ///< central differences at the halved step
    bool richardson_agrees = false;
};

/// {f, g} = f_r g_pr - f_pr g_r + f_phi g_J - f_J g_phi, each partial by central differences
/// with step h * max(1, |coordinate|) and one Richardson halving.
BracketEstimate poisson_bracket_estimate(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& pt,
                                         double h = 1e-5);

Complex poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& pt, double h = 1e-5);

struct BracketEntry {
    std::string bracket;
    Complex value;
    Complex expected;
    double abs_err = 0.0;
    double rel_err = 0.0;
    bool richardson_agrees = false;
};

struct BracketReport {
    std::vector<BracketEntry> entries;
    double h = 1e-5;
    IntegralKind kind = IntegralKind::kepler;
    int k = 1;
    int n = 1;

    const BracketEntry& at(const std::string& name) const;
};

/// Evaluate {J,Z}, {J,Zbar}, {Z,Zbar}, {H,Z}, {H,J} by finite differences and compare each
/// with its closed form. {J,Z} is listed against both the printed k Z and the value the
/// canonical bracket implies for a phase e^{ik phi}; {Z,Zbar} against each candidate
/// closed form and its negative.
BracketReport verify_w_algebra(const Params& params, const PhasePoint& pt, double h = 1e-5);

}  // namespace cone
