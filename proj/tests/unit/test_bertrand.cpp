#include "cone/actions.hpp"
#include "cone/bertrand.hpp"
#include "cone/dynamics.hpp"
#include "cone/errors.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace cone;
using cone::testing::Gen;
using cone::testing::kepler;
using cone::testing::oscillator;

namespace {
const auto kUnit = ConeGeometry::from_ratio(1, 1);

/// Kepler radial period from Kepler's third law, T = pi kappa sqrt(m / (2 |E|^3)).
double kepler_period_oracle(double m, double kappa, double E) {
    return kPi * kappa * std::sqrt(m / (2.0 * std::pow(std::abs(E), 3)));
}
}  // namespace

TEST_CASE("apsidal angle examples") {
    CHECK(apsidal_angle(kepler(kUnit), -3.0 / 8.0, 1.0).delta_phi == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(apsidal_angle(oscillator(kUnit), 1.5, 1.0).delta_phi == doctest::Approx(kPi / 2).epsilon(1e-9));
    const auto half = kepler(ConeGeometry::from_ratio(1, 2));
    for (const double f : {0.2, 0.5, 0.9})
        CHECK(apsidal_angle(half, f * circular_orbit(half, 1.0).E_c, 1.0).delta_phi ==
              doctest::Approx(2 * kPi).epsilon(1e-9));
}

TEST_CASE("apsidal angle reports lambda and rejects degenerate input") {
    const auto p = kepler(ConeGeometry::from_ratio(1, 2));
    const auto res = apsidal_angle(p, -0.1, 1.0);
    CHECK(res.lambda == doctest::Approx(2.0));
    CHECK(res.E == -0.1);
    CHECK(res.quadrature_error_estimate < 1e-10);
    CHECK_THROWS_AS(apsidal_angle(p, circular_orbit(p, 1.0).E_c, 1.0), DegenerateError);
    CHECK_THROWS_AS(apsidal_angle(p, -0.1, 0.0), DomainError);
}

TEST_CASE("radial period examples") {
    SUBCASE("oscillator period is pi for every bound level") {
        Gen gen(301);
        for (int i = 0; i < 10; ++i) {
            const auto lv = gen.bound_level(oscillator(kUnit));
            CHECK(radial_period(oscillator(kUnit), lv.E, lv.J) == doctest::Approx(kPi).epsilon(1e-9));
        }
    }
    SUBCASE("Kepler period follows the third law") {
        const double T = radial_period(kepler(kUnit), -1.0 / 8.0, 1.0);
        CHECK(kepler_period_oracle(1.0, 1.0, -1.0 / 8.0) == doctest::Approx(16.0 * kPi).epsilon(1e-15));
        CHECK(T == doctest::Approx(16.0 * kPi).epsilon(1e-9));
        Gen gen(302);
        for (int i = 0; i < 20; ++i) {
            const auto g = gen.pick(cone::testing::rational_cones());
            const double m = gen.uniform(0.5, 2.0);
            const double kappa = gen.uniform(0.5, 2.0);
            const auto p = kepler(g, kappa, m);
            const auto lv = gen.bound_level(p);
            CHECK(radial_period(p, lv.E, lv.J) ==
                  doctest::Approx(kepler_period_oracle(m, kappa, lv.E)).epsilon(1e-9));
        }
    }
    SUBCASE("near-circular Kepler period matches the harmonic limit") {
        const auto p = kepler(kUnit);
        const double eps = 1e-5;
        const double T = radial_period(p, -0.5 + eps, 1.0);
        // U_eff'' at r_c = 1 is 1, so the harmonic period is 2 pi
        CHECK(T == doctest::Approx(kTwoPi).epsilon(1e-4));
        CHECK(small_oscillation_freq(p, 1.0).omega_sq == doctest::Approx(1.0));
    }
}

TEST_CASE("circular orbit examples") {
    auto c = circular_orbit(kepler(kUnit), 1.0);
    CHECK(c.r_c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.E_c == doctest::Approx(-0.5).epsilon(1e-12));
    c = circular_orbit(oscillator(kUnit), 1.0);
    CHECK(c.r_c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.E_c == doctest::Approx(1.0).epsilon(1e-12));
    c = circular_orbit(kepler(ConeGeometry::from_ratio(1, 2)), 1.0);
    CHECK(c.r_c == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(c.E_c == doctest::Approx(-1.0 / 8.0).epsilon(1e-12));
    CHECK_THROWS_AS(circular_orbit(kepler(kUnit), 0.0), StructuralError);
    // a repulsive power law has no minimum
    CHECK_THROWS_AS(circular_orbit(Params(1.0, kUnit, PowerLaw(1.0, -1.0)), 1.0), StructuralError);
}

TEST_CASE("small oscillation frequencies") {
    Gen gen(303);
    for (const double alpha : {-1.5, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0}) {
        const double A = (alpha < 0 ? -1.0 : 1.0) * gen.uniform(0.5, 2.0);
        const auto so = small_oscillation_freq(Params(1.0, kUnit, PowerLaw(A, alpha)), gen.uniform(0.5, 2.0));
        CHECK(so.omega_sq == doctest::Approx(alpha + 2.0).epsilon(1e-10));
    }
    const auto half = ConeGeometry::from_ratio(1, 2);
    const auto k = small_oscillation_freq(kepler(half), 1.0);
    CHECK(k.omega_sq == doctest::Approx(1.0));
    CHECK(k.apsidal_limit == doctest::Approx(kPi / 0.5));
    const auto l = small_oscillation_freq(Params(1.0, half, LogPotential(1.0, 1.0)), 1.0);
    CHECK(l.omega_sq == doctest::Approx(2.0));
    CHECK(l.apsidal_limit == doctest::Approx(kPi / (0.5 * std::sqrt(2.0))));
}

TEST_CASE("width law") {
    SUBCASE("Kepler width follows the completed square") {
        // U(x) = m/2 (x - kappa/lambda)^2 + U0, so x2 - x1 = 2 sqrt(2 (U - U0) / m)
        for (const double m : {1.0, 2.5}) {
            const auto fit = width_law_check(kepler(kUnit, 1.0, m), 1.0, 50);
            CHECK(fit.max_residual < 1e-8);
            CHECK(fit.a_fit == doctest::Approx(2.0 * std::sqrt(2.0 / m)).epsilon(1e-10));
            CHECK(fit.levels.size() == 50);
        }
    }
    SUBCASE("oscillator width follows the quadratic in x^2") {
        // U = m y / 2 + c / y with y = x^2; the roots give (x2 - x1)^2 = 2 (U - U0) / m
        for (const double m : {1.0, 0.5}) {
            const auto fit = width_law_check(oscillator(ConeGeometry::from_ratio(2, 3), 1.3, m), 0.8, 50);
            CHECK(fit.max_residual < 1e-8);
            CHECK(fit.a_fit == doctest::Approx(std::sqrt(2.0 / m)).epsilon(1e-10));
        }
    }
    SUBCASE("log potential violates the law") {
        const auto fit = width_law_check(Params(1.0, kUnit, LogPotential(1.0, 1.0)), 1.0, 50);
        CHECK(fit.max_residual > 1e-2);
    }
    SUBCASE("other power laws violate it too") {
        CHECK(width_law_check(Params(1.0, kUnit, PowerLaw(1.0, 1.0)), 1.0, 50).max_residual > 1e-3);
    }
}

TEST_CASE("scan examples") {
    const EnergyGrid energies{EnergyGrid::Mode::relative, {0.05, 0.25, 0.5, 0.75, 0.95}};
    const std::vector<double> lambdas{0.5, 1.0, 2.0};
    const auto reports = bertrand_scan({-1.0, 1.0, 2.0}, 1.0, 1.0, kUnit, energies, lambdas);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].flatness < 1e-6);
    CHECK(reports[0].constant == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(reports[0].verdict == Verdict::closed_orbit_candidate);
    CHECK(reports[1].flatness > 1e-3);
    CHECK(reports[1].expected_constant == doctest::Approx(kPi / std::sqrt(3.0)));
    CHECK(reports[1].verdict == Verdict::rejected);
    CHECK(reports[2].flatness < 1e-6);
    CHECK(reports[2].constant == doctest::Approx(kPi / 2).epsilon(1e-9));
    CHECK(reports[2].verdict == Verdict::closed_orbit_candidate);
    for (const auto& r : reports) {
        CHECK(r.flatness >= 0.0);
        CHECK(r.feasible == 15);
    }
}

TEST_CASE("scan flags infeasible cells") {
    // absolute energies above the Kepler escape level are infeasible
    const EnergyGrid energies{EnergyGrid::Mode::absolute, {0.5, 1.0}};
    const auto rep = scan_potential(kepler(kUnit), energies, {1.0});
    CHECK(rep.feasible == 0);
    CHECK(rep.verdict == Verdict::no_data);
    for (const auto& c : rep.cells)
        CHECK(c.status == CellStatus::infeasible);
}

TEST_CASE("property: apsidal angle is constant over energy and angular momentum") {
    for (const auto& g : cone::testing::rational_cones()) {
        for (const auto& p : {kepler(g), oscillator(g)}) {
            const double expected = (std::holds_alternative<Kepler>(p.potential()) ? kPi : kPi / 2) / g.scale();
            for (int i = 1; i <= 10; ++i) {
                const double J = 0.2 * i;
                const double E_c = circular_orbit(p, J).E_c;
                for (int j = 1; j <= 10; ++j) {
                    const double f = j / 11.0;
                    const double E = std::holds_alternative<Kepler>(p.potential()) ? E_c * (1.0 - f)
                                                                                    : E_c * (1.0 + 3.0 * f);
                    CHECK(std::abs(apsidal_angle(p, E, J).delta_phi - expected) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("property: near-circular limit converges linearly") {
    const Params p(1.0, kUnit, PowerLaw(1.0, 1.0));
    const double J = 1.0;
    const auto so = small_oscillation_freq(p, J);
    const double E_c = circular_orbit(p, J).E_c;
    const double d1 = apsidal_angle(p, E_c + 1e-3, J).delta_phi - so.apsidal_limit;
    const double d2 = apsidal_angle(p, E_c + 5e-4, J).delta_phi - so.apsidal_limit;
    CHECK(std::abs(d1) < 1e-2);
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("property: scaling law in s") {
    Gen gen(304);
    for (int i = 0; i < 30; ++i) {
        const double s = gen.uniform(0.2, 1.5);
        const double alpha = gen.pick(std::vector<double>{-1.5, -0.5, 0.5, 1.0, 3.0});
        const Potential pot = PowerLaw(alpha < 0 ? -1.0 : 1.0, alpha);
        const Params ps(1.0, ConeGeometry::from_scale(s), pot);
        const Params p1(1.0, kUnit, pot);
        const double lambda = gen.uniform(0.5, 2.0);
        const double E_c = circular_orbit(p1, lambda).E_c;
        const double E = E_c + std::abs(E_c) * gen.uniform(0.05, 0.5) + (alpha > 0 ? gen.uniform(0.05, 1.0) : 0.0);
        const double at_s = apsidal_angle(ps, E, lambda * s).delta_phi;
        const double at_1 = apsidal_angle(p1, E, lambda).delta_phi;
        CHECK(at_s == doctest::Approx(at_1 / s).epsilon(1e-10));
    }
}

TEST_CASE("property: radial period times the radial frequency is a full turn") {
    Gen gen(305);
    for (int i = 0; i < 20; ++i) {
        const auto g = gen.pick(cone::testing::rational_cones());
        const auto p = i % 2 ? kepler(g) : oscillator(g);
        const auto lv = gen.bound_level(p);
        const double T = radial_period(p, lv.E, lv.J);
        CHECK(T * frequencies(p, lv.E, lv.J).omega2 == doctest::Approx(kTwoPi).epsilon(1e-12));
    }
}
