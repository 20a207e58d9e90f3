#include "cone/actions.hpp"
#include "cone/bertrand.hpp"
#include "cone/dynamics.hpp"
#include "cone/errors.hpp"
#include "cone/numerics.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace cone;
using cone::testing::Gen;
using cone::testing::kepler;
using cone::testing::oscillator;

namespace {
const auto kUnit = ConeGeometry::from_ratio(1, 1);
}

TEST_CASE("energy at hand-evaluated points") {
    const Params free_half(1.0, ConeGeometry::from_ratio(1, 2), PowerLaw(0.0, 1.0));
    CHECK(energy(free_half, PhasePoint(2.0, 0.0, 1.0, 1.0)) == doctest::Approx(1.0));
    CHECK(energy(kepler(kUnit), PhasePoint(1.0, 0.0, 0.0, 0.0)) == doctest::Approx(-1.0));
    CHECK(energy(oscillator(kUnit), PhasePoint(1.0, 0.0, 0.0, 1.0)) == doctest::Approx(1.0));
}

TEST_CASE("effective potential examples") {
    const auto p = kepler(kUnit);
    CHECK(effective_potential(p, 1.0, 1.0) == doctest::Approx(-0.5));
    CHECK(effective_potential(p, 1.0, 2.0) == doctest::Approx(-0.375));
    CHECK(effective_potential(p, 0.0, 3.0) == p.V(3.0));
    CHECK(effective_potential(oscillator(kUnit), 0.0, 3.0) == oscillator(kUnit).V(3.0));
    CHECK_THROWS_AS(effective_potential(p, 1.0, 0.0), DomainError);
}

TEST_CASE("turning point examples") {
    auto tp = turning_points(kepler(kUnit), -3.0 / 8.0, 1.0);
    CHECK(tp.r_min == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(tp.r_max == doctest::Approx(2.0).epsilon(1e-12));

    tp = turning_points(kepler(kUnit), -0.5, 1.0);
    CHECK(tp.circular());
    CHECK(tp.r_min == doctest::Approx(1.0).epsilon(1e-12));

    tp = turning_points(oscillator(kUnit), 1.0, 1.0);
    CHECK(tp.circular());
    CHECK(tp.r_min == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("turning point errors") {
    CHECK_THROWS_AS(turning_points(kepler(kUnit), 0.1, 1.0), UnboundedError);
    CHECK_THROWS_AS(turning_points(kepler(kUnit), -0.6, 1.0), ForbiddenError);
    CHECK_THROWS_AS(turning_points(oscillator(kUnit), 0.5, 1.0), ForbiddenError);
}

TEST_CASE("property: turning points sit on the energy level") {
    Gen gen(201);
    for (const auto& g : cone::testing::rational_cones()) {
        for (const auto& p : {kepler(g), oscillator(g), Params(1.0, g, PowerLaw(1.0, 1.0)),
                              Params(1.0, g, LogPotential(1.0, 1.0))}) {
            for (int i = 0; i < 10; ++i) {
                const double J = gen.uniform(0.3, 2.0);
                const double E_c = circular_orbit(p, J).E_c;
                const double E = E_c + std::abs(E_c) * gen.uniform(0.01, 0.9) + gen.uniform(0.01, 0.5) *
                                 (std::holds_alternative<Kepler>(p.potential()) ? 0.0 : 1.0);
                const auto tp = turning_points(p, E, J);
                CHECK(tp.r_min < tp.r_max);
                CHECK(std::abs(effective_potential(p, J, tp.r_min) - E) <= 1e-10 * std::abs(E));
                CHECK(std::abs(effective_potential(p, J, tp.r_max) - E) <= 1e-10 * std::abs(E));
            }
        }
    }
}

TEST_CASE("step is reversible") {
    const auto p = kepler(ConeGeometry::from_ratio(2, 3));
    const PhasePoint pt(1.3, 0.4, 0.2, 0.9);
    const PhasePoint back = step(p, step(p, pt, 1e-3), -1e-3);
    CHECK(std::abs(back.r() - pt.r()) < 1e-12);
    CHECK(std::abs(back.phi() - pt.phi()) < 1e-12);
    CHECK(std::abs(back.p_r() - pt.p_r()) < 1e-12);
    CHECK(back.J() == pt.J());
}

TEST_CASE("circular Kepler orbit stays at r = 1") {
    const auto traj = integrate(kepler(kUnit), PhasePoint(1.0, 0.0, 0.0, 1.0), 1e-3, 20000);
    for (const auto& pt : traj.points)
        CHECK(std::abs(pt.r() - 1.0) < 1e-10);
}

TEST_CASE("circular oscillator orbit keeps a constant radius") {
    const auto traj = integrate(oscillator(kUnit), PhasePoint(1.0, 0.0, 0.0, 1.0), 1e-3, 20000);
    for (const auto& pt : traj.points)
        CHECK(std::abs(pt.r() - 1.0) < 1e-10);
}

TEST_CASE("free radial motion") {
    const Params free(1.0, kUnit, PowerLaw(0.0, 1.0));
    const auto traj = integrate(free, PhasePoint(1.0, 0.0, 1.0, 0.0), 1e-3, 1000);
    CHECK(std::abs(traj.points.back().r() - 2.0) < 1e-9);
    CHECK(traj.times.back() == doctest::Approx(1.0));
}

TEST_CASE("trajectory layout and sampling") {
    const auto traj = integrate(kepler(kUnit), PhasePoint(1.2, 0.0, 0.1, 1.0), 1e-3, 1000, 10);
    CHECK(traj.size() == 101);
    CHECK(traj.points.size() == traj.size());
    CHECK(traj.series_H.size() == traj.size());
    CHECK(traj.series_J.size() == traj.size());
    CHECK(traj.phi_unwrapped.size() == traj.size());
    for (std::size_t i = 1; i < traj.size(); ++i) {
        CHECK(traj.times[i] > traj.times[i - 1]);
        CHECK(traj.phi_unwrapped[i] > traj.phi_unwrapped[i - 1]);
    }
}

TEST_CASE("property: unwrapped angle agrees with the stored angle") {
    Gen gen(202);
    for (int i = 0; i < 10; ++i) {
        const auto g = gen.pick(cone::testing::rational_cones());
        const auto p = gen.integer(0, 1) ? kepler(g) : oscillator(g);
        const auto lv = gen.bound_level(p);
        const auto traj = integrate(p, gen.point_on(p, lv), 1e-3, 20000, 7);
        for (std::size_t j = 0; j < traj.size(); ++j) {
            const double d = std::remainder(traj.phi_unwrapped[j] - traj.points[j].phi(), kTwoPi);
            CHECK(std::abs(d) < 1e-9);
        }
    }
}

TEST_CASE("property: J series is bitwise constant") {
    Gen gen(203);
    for (int i = 0; i < 10; ++i) {
        const auto g = gen.pick(cone::testing::rational_cones());
        const auto p = gen.integer(0, 1) ? kepler(g) : oscillator(g);
        const auto traj = integrate(p, gen.point_on(p, gen.bound_level(p)), 1e-3, 5000);
        for (const double J : traj.series_J)
            CHECK(J == traj.series_J.front());
    }
}

TEST_CASE("Kepler E = -3/8 energy drift over 1e5 steps at dt = 1e-3") {
    const auto p = kepler(kUnit);
    const auto tp = turning_points(p, -3.0 / 8.0, 1.0);
    const auto traj = integrate(p, PhasePoint(tp.r_min, 0.0, 0.0, 1.0), 1e-3, 100000);
    double worst = 0.0;
    for (const double H : traj.series_H)
        worst = std::max(worst, std::abs(H - traj.series_H.front()) / std::abs(traj.series_H.front()));
    MESSAGE("max relative energy drift: " << worst);
    CHECK(worst < 5e-7);
}

namespace {

struct DriftProfile {
    double worst = 0.0;   ///< max |H - H0| / |H0|
    double early = 0.0;   ///< same, first half of the run
    double late = 0.0;    ///< same, second half
    double slope = 0.0;   ///< least-squares slope of |H - H0| / |H0| against t
};

DriftProfile drift_profile(const Trajectory& traj) {
    const double H0 = traj.series_H.front();
    std::vector<double> dev(traj.size());
    for (std::size_t j = 0; j < traj.size(); ++j)
        dev[j] = std::abs(traj.series_H[j] - H0) / std::abs(H0);
    const std::size_t half = traj.size() / 2;
    DriftProfile d;
    d.early = *std::max_element(dev.begin(), dev.begin() + half);
    d.late = *std::max_element(dev.begin() + half, dev.end());
    d.worst = std::max(d.early, d.late);
    d.slope = numerics::fit_slope(traj.times, dev);
    return d;
}

}  // namespace

TEST_CASE("property: energy error is bounded and oscillatory") {
    // dt is tied to the radial period so every run spans 20 periods
    Gen gen(204);
    for (int i = 0; i < 12; ++i) {
        const auto g = gen.pick(cone::testing::rational_cones());
        const auto p = i % 2 ? kepler(g) : oscillator(g);
        const auto lv = gen.bound_level(p, 0.3, 0.7);
        const double dt = radial_period(p, lv.E, lv.J) / 5000.0;
        const auto d = drift_profile(integrate(p, gen.point_on(p, lv), dt, 100000, 10));
        MESSAGE("drift " << d.worst << " early " << d.early << " late " << d.late << " slope " << d.slope);
        // second-order error at 5000 steps per period; boundedness is the point here
        CHECK(d.worst < 1e-4);
        CHECK(d.late < 1.5 * d.early);
    }
}

TEST_SUITE("literal-thresholds") {
    TEST_CASE("property: fixed dt = 1e-3 energy drift below 1e-7 with fitted slope below 1e-12") {
        Gen gen(207);
        for (int i = 0; i < 12; ++i) {
            const auto g = gen.pick(cone::testing::rational_cones());
            const auto p = i % 2 ? kepler(g) : oscillator(g);
            const auto lv = gen.bound_level(p);
            const auto d = drift_profile(integrate(p, gen.point_on(p, lv), 1e-3, 100000, 10));
            MESSAGE("E " << lv.E << " J " << lv.J << ": drift " << d.worst << " slope " << d.slope);
            CHECK(d.worst < 1e-7);
            CHECK(std::abs(d.slope) < 1e-12);
        }
    }
}

TEST_CASE("property: forward then backward integration returns to the start") {
    Gen gen(205);
    for (int i = 0; i < 10; ++i) {
        const auto g = gen.pick(cone::testing::rational_cones());
        const auto p = gen.integer(0, 1) ? kepler(g) : oscillator(g);
        const PhasePoint pt0 = gen.point_on(p, gen.bound_level(p));
        const auto fwd = integrate(p, pt0, 1e-3, 5000);
        const auto back = integrate(p, fwd.points.back(), -1e-3, 5000);
        const auto& end = back.points.back();
        CHECK(std::abs(end.r() - pt0.r()) < 1e-10);
        CHECK(std::abs(end.p_r() - pt0.p_r()) < 1e-10);
        CHECK(std::abs(std::remainder(end.phi() - pt0.phi(), kTwoPi)) < 1e-10);
        CHECK(end.J() == pt0.J());
    }
}

TEST_CASE("radial infall hits the tip and reports the step") {
    try {
        integrate(kepler(kUnit), PhasePoint(1.0, 0.0, -1.0, 0.0), 1e-2, 100000);
        FAIL("expected a tip collision");
    } catch (const TipCollisionError& e) {
        CHECK(e.step_index() > 0);
        CHECK(e.step_index() < 100000);
    }
}

namespace {

Trajectory run_periods(const Params& p, double E, double J, double periods, double steps_per_period = 1e5,
                       std::size_t sample_every = 10) {
    const double T = radial_period(p, E, J);
    const double dt = T / steps_per_period;
    const auto tp = turning_points(p, E, J);
    return integrate(p, PhasePoint(tp.r_min, 0.3, 0.0, J), dt,
                     static_cast<std::size_t>(periods * steps_per_period), sample_every);
}

}  // namespace

TEST_CASE("closure examples") {
    SUBCASE("Kepler s = 1 closes after one radial period") {
        const auto p = kepler(kUnit);
        const auto c = detect_closure(run_periods(p, -0.3, 1.0, 2.5));
        REQUIRE(c);
        CHECK(c->radial_periods == 1);
        CHECK(c->windings == 1);
    }
    SUBCASE("Kepler s = 2/3 closes after two radial periods with phi advanced by 6 pi") {
        const auto p = kepler(ConeGeometry::from_ratio(2, 3));
        const double E = 0.6 * circular_orbit(p, 1.0).E_c;
        const auto c = detect_closure(run_periods(p, E, 1.0, 3.5));
        REQUIRE(c);
        CHECK(c->radial_periods == 2);
        CHECK(c->windings == 3);
        CHECK(c->time == doctest::Approx(2.0 * radial_period(p, E, 1.0)).epsilon(1e-6));
    }
    SUBCASE("irrational s does not close") {
        const auto p = kepler(ConeGeometry::from_scale(1.0 / std::sqrt(2.0)));
        const double E = 0.6 * circular_orbit(p, 1.0).E_c;
        CHECK_FALSE(detect_closure(run_periods(p, E, 1.0, 12.0, 2e4)));
    }
    SUBCASE("circular orbits and J = 0") {
        const auto traj = integrate(kepler(kUnit), PhasePoint(1.0, 0.0, 0.0, 1.0), 1e-3, 10000);
        CHECK_FALSE(detect_closure(traj));
        const auto radial = integrate(oscillator(kUnit), PhasePoint(1.0, 0.0, 0.5, 0.0), 1e-3, 100);
        CHECK_THROWS_AS(detect_closure(radial), DomainError);
    }
}

TEST_CASE("property: closure count matches the frequency ratio") {
    Gen gen(206);
    for (int i = 0; i < 12; ++i) {
        const auto g = gen.pick(cone::testing::rational_cones());
        const auto p = i % 2 ? kepler(g) : oscillator(g);
        const auto lv = gen.bound_level(p, 0.2, 0.8);
        const auto predicted = predict_closure(p, lv.E, lv.J);
        REQUIRE(predicted);
        const auto c = detect_closure(run_periods(p, lv.E, lv.J, predicted->n2 + 0.5));
        REQUIRE(c);
        CHECK(c->radial_periods == predicted->n2);
    }
}

TEST_CASE("apsides alternate and are half a radial period apart") {
    const auto p = kepler(ConeGeometry::from_ratio(1, 2));
    const double E = 0.5 * circular_orbit(p, 1.0).E_c;
    const double T = radial_period(p, E, 1.0);
    const auto aps = find_apsides(run_periods(p, E, 1.0, 3.0));
    REQUIRE(aps.size() >= 5);
    for (std::size_t i = 1; i < aps.size(); ++i) {
        CHECK(aps[i].pericentre != aps[i - 1].pericentre);
        CHECK(aps[i].time - aps[i - 1].time == doctest::Approx(T / 2).epsilon(1e-6));
    }
}
