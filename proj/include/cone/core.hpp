#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <variant>

namespace cone {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to [0, 2pi).
double reduce_angle(double phi);

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// Reduced rational form s = k/n of the scale factor.
struct Ratio {
    int k = 1;
    int n = 1;
    friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// A cone is fully described by the scale factor s = 1 - deficit/(2 pi):
/// the polar angle on the unrolled cone is s times the rescaled angle phi in [0, 2 pi).
class ConeGeometry {
public:
    /// Plain floating scale factor, no rational form attached.
    static ConeGeometry from_scale(double s);
    /// s = k/n, reduced by gcd; this is the only way to obtain a rational cone.
    static ConeGeometry from_ratio(int k, int n);

    double scale() const noexcept { return s_; }
    const std::optional<Ratio>& ratio() const noexcept { return ratio_; }
    bool is_rational() const noexcept { return ratio_.has_value(); }
    /// s > 1: more than a full turn of angle; not a physical cone but still well-defined.
    bool excess_angle() const noexcept { return s_ > 1.0; }
    double deficit_angle() const noexcept { return kTwoPi * (1.0 - s_); }
    /// Half-opening angle asin(s); absent for s > 1.
    std::optional<double> half_angle() const;

    friend bool operator==(const ConeGeometry&, const ConeGeometry&) = default;

private:
    ConeGeometry(double s, std::optional<Ratio> r) : s_(s), ratio_(r) {}
    double s_;
    std::optional<Ratio> ratio_;
};

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

/// V(r) = -kappa / r
struct Kepler {
    explicit Kepler(double kappa);
    double kappa;
    friend bool operator==(const Kepler&, const Kepler&) = default;
};

/// V(r) = m omega^2 r^2 / 2; the stiffness beta = m omega^2 needs the particle mass.
struct Oscillator {
    explicit Oscillator(double omega);
    double omega;
    double beta(double mass) const noexcept { return mass * omega * omega; }
    friend bool operator==(const Oscillator&, const Oscillator&) = default;
};

/// V(r) = A r^alpha with alpha > -2. A = 0 is accepted and gives the free particle.
struct PowerLaw {
    PowerLaw(double A, double alpha);
    double A;
    double alpha;
    friend bool operator==(const PowerLaw&, const PowerLaw&) = default;
};

/// V(r) = B ln(r / r0)
struct LogPotential {
    LogPotential(double B, double r0);
    double B;
    double r0;
    friend bool operator==(const LogPotential&, const LogPotential&) = default;
};

using Potential = std::variant<Kepler, Oscillator, PowerLaw, LogPotential>;

double potential_value(const Potential& pot, double mass, double r);
double potential_d1(const Potential& pot, double mass, double r);
double potential_d2(const Potential& pot, double mass, double r);

/// V(r + d) - V(r) evaluated without cancellation for small |d|.
double potential_difference(const Potential& pot, double mass, double r, double d);

/// Kepler(kappa) -> PowerLaw(-kappa, -1), Oscillator(omega) -> PowerLaw(m omega^2 / 2, 2).
/// Log potentials have no power-law form.
std::optional<PowerLaw> to_power_law(const Potential& pot, double mass);

std::string describe(const Potential& pot);

// ---------------------------------------------------------------------------
// Phase space
// ---------------------------------------------------------------------------

/// Canonical state (r, phi; p_r, J) with J = m r^2 s^2 dphi/dt signed by orientation.
class PhasePoint {
public:
    PhasePoint(double r, double phi, double p_r, double J);

    double r() const noexcept { return r_; }
    double phi() const noexcept { return phi_; }
    double p_r() const noexcept { return p_r_; }
    double J() const noexcept { return J_; }

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

private:
    double r_;
    double phi_;
    double p_r_;
    double J_;
};

/// Point in the flat chart x = r (cos phi, sin phi) with conjugate momentum p.
struct CartesianPoint {
    double x1 = 0.0;
    double x2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

CartesianPoint to_cartesian(const PhasePoint& pt);
PhasePoint from_cartesian(const CartesianPoint& c);

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

class Params {
public:
    Params(double mass, ConeGeometry geometry, Potential potential);

    double mass() const noexcept { return m_; }
    double scale() const noexcept { return geometry_.scale(); }
    const ConeGeometry& geometry() const noexcept { return geometry_; }
    const Potential& potential() const noexcept { return potential_; }

    double V(double r) const { return potential_value(potential_, m_, r); }
    double dV(double r) const { return potential_d1(potential_, m_, r); }
    double d2V(double r) const { return potential_d2(potential_, m_, r); }

    friend bool operator==(const Params&, const Params&) = default;

private:
    double m_;
    ConeGeometry geometry_;
    Potential potential_;
};

}  // namespace cone
