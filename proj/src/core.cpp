#include "cone/core.hpp"

#include "cone/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace cone {

namespace {

void require_positive_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("radius must be positive and finite, got " + std::to_string(r));
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double reduce_angle(double phi) {
    if (!std::isfinite(phi))
        throw DomainError("angle must be finite");
    double a = std::fmod(phi, kTwoPi);
    if (a < 0.0)
        a += kTwoPi;
    // fmod of a tiny negative number plus 2pi can round up to exactly 2pi
    if (a >= kTwoPi)
        a = 0.0;
    return a;
}

// --- geometry --------------------------------------------------------------

ConeGeometry ConeGeometry::from_scale(double s) {
    if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError("scale factor must be positive and finite");
    return ConeGeometry(s, std::nullopt);
}

ConeGeometry ConeGeometry::from_ratio(int k, int n) {
    if (k <= 0 || n <= 0)
        throw DomainError("rational scale factor needs positive k and n");
    const int g = std::gcd(k, n);
    k /= g;
    n /= g;
    return ConeGeometry(static_cast<double>(k) / static_cast<double>(n), Ratio{k, n});
}

std::optional<double> ConeGeometry::half_angle() const {
    if (s_ > 1.0)
        return std::nullopt;
    return std::asin(s_);
}

// --- potentials ------------------------------------------------------------

Kepler::Kepler(double k) : kappa(k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw DomainError("Kepler coupling kappa must be positive");
}

Oscillator::Oscillator(double w) : omega(w) {
    if (!(w > 0.0) || !std::isfinite(w))
        throw DomainError("oscillator frequency omega must be positive");
}

PowerLaw::PowerLaw(double a, double exponent) : A(a), alpha(exponent) {
    if (!std::isfinite(a) || !std::isfinite(exponent))
        throw DomainError("power-law coefficients must be finite");
    if (!(exponent > -2.0))
        throw DomainError("power-law exponent must exceed -2");
}

LogPotential::LogPotential(double b, double radius) : B(b), r0(radius) {
    if (!(b > 0.0) || !std::isfinite(b))
        throw DomainError("log-potential strength B must be positive");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw DomainError("log-potential reference radius r0 must be positive");
}

double potential_value(const Potential& pot, double mass, double r) {
    require_positive_radius(r);
    return std::visit(Overloaded{
                          [&](const Kepler& p) { return -p.kappa / r; },
                          [&](const Oscillator& p) { return 0.5 * p.beta(mass) * r * r; },
                          [&](const PowerLaw& p) { return p.A * std::pow(r, p.alpha); },
                          [&](const LogPotential& p) { return p.B * std::log(r / p.r0); },
                      },
                      pot);
}

double potential_d1(const Potential& pot, double mass, double r) {
    require_positive_radius(r);
    return std::visit(Overloaded{
                          [&](const Kepler& p) { return p.kappa / (r * r); },
                          [&](const Oscillator& p) { return p.beta(mass) * r; },
                          [&](const PowerLaw& p) { return p.A * p.alpha * std::pow(r, p.alpha - 1.0); },
                          [&](const LogPotential& p) { return p.B / r; },
                      },
                      pot);
}

double potential_d2(const Potential& pot, double mass, double r) {
    require_positive_radius(r);
    return std::visit(Overloaded{
                          [&](const Kepler& p) { return -2.0 * p.kappa / (r * r * r); },
                          [&](const Oscillator& p) { return p.beta(mass); },
                          [&](const PowerLaw& p) {
                              return p.A * p.alpha * (p.alpha - 1.0) * std::pow(r, p.alpha - 2.0);
                          },
                          [&](const LogPotential& p) { return -p.B / (r * r); },
                      },
                      pot);
}

double potential_difference(const Potential& pot, double mass, double r, double d) {
    require_positive_radius(r);
    require_positive_radius(r + d);
    return std::visit(Overloaded{
                          [&](const Kepler& p) { return p.kappa * d / (r * (r + d)); },
                          [&](const Oscillator& p) { return p.beta(mass) * d * (r + 0.5 * d); },
                          [&](const PowerLaw& p) {
                              return p.A * std::pow(r, p.alpha) * std::expm1(p.alpha * std::log1p(d / r));
                          },
                          [&](const LogPotential& p) { return p.B * std::log1p(d / r); },
                      },
                      pot);
}

std::optional<PowerLaw> to_power_law(const Potential& pot, double mass) {
    return std::visit(Overloaded{
                          [](const Kepler& p) -> std::optional<PowerLaw> { return PowerLaw(-p.kappa, -1.0); },
                          [&](const Oscillator& p) -> std::optional<PowerLaw> {
                              return PowerLaw(0.5 * p.beta(mass), 2.0);
                          },
                          [](const PowerLaw& p) -> std::optional<PowerLaw> { return p; },
                          [](const LogPotential&) -> std::optional<PowerLaw> { return std::nullopt; },
                      },
                      pot);
}

std::string describe(const Potential& pot) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const Kepler& p) { os << "kepler(kappa=" << p.kappa << ")"; },
                   [&](const Oscillator& p) { os << "oscillator(omega=" << p.omega << ")"; },
                   [&](const PowerLaw& p) { os << "power_law(A=" << p.A << ", alpha=" << p.alpha << ")"; },
                   [&](const LogPotential& p) { os << "log(B=" << p.B << ", r0=" << p.r0 << ")"; },
               },
               pot);
    return os.str();
}

// --- phase space -----------------------------------------------------------

PhasePoint::PhasePoint(double r, double phi, double p_r, double J)
    : r_(r), phi_(reduce_angle(phi)), p_r_(p_r), J_(J) {
    require_positive_radius(r);
    if (!std::isfinite(p_r) || !std::isfinite(J))
        throw DomainError("momenta must be finite");
}

CartesianPoint to_cartesian(const PhasePoint& pt) {
    const double c = std::cos(pt.phi());
    const double s = std::sin(pt.phi());
    // p = p_r e_r + (J / r) e_phi, so that x.p = r p_r and x cross p = J
    const double pt_ = pt.J() / pt.r();
    return CartesianPoint{pt.r() * c, pt.r() * s, pt.p_r() * c - pt_ * s, pt.p_r() * s + pt_ * c};
}

PhasePoint from_cartesian(const CartesianPoint& c) {
    const double r = std::hypot(c.x1, c.x2);
    if (!(r > 0.0))
        throw DomainError("the cone tip (origin) has no polar chart");
    const double phi = std::atan2(c.x2, c.x1);
    const double p_r = (c.x1 * c.p1 + c.x2 * c.p2) / r;
    const double J = c.x1 * c.p2 - c.x2 * c.p1;
    return PhasePoint(r, phi, p_r, J);
}

// --- params ----------------------------------------------------------------

Params::Params(double mass, ConeGeometry geometry, Potential potential)
    : m_(mass), geometry_(geometry), potential_(std::move(potential)) {
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw DomainError("mass must be positive");
}

}  // namespace cone
