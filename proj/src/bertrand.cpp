#include "cone/bertrand.hpp"

#include "cone/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <variant>

namespace cone {

namespace {

/// Limit of U_eff as r -> infinity when it is finite.
std::optional<double> escape_energy(const Params& params) {
    const auto& pot = params.potential();
    if (std::holds_alternative<Kepler>(pot))
        return 0.0;
    if (const auto* p = std::get_if<PowerLaw>(&pot); p && p->alpha < 0.0)
        return 0.0;
    return std::nullopt;
}

/// Turning points of a non-circular orbit; DegenerateError when the annulus is too thin
/// for the roots to carry meaningful width.
TurningPoints noncircular_turning_points(const Params& params, double E, double J) {
    const auto tp = turning_points(params, E, J);
    if (tp.r_max - tp.r_min <= 1e-7 * tp.r_max)
        throw DegenerateError("orbit is circular to within tolerance; use small_oscillation_freq");
    return tp;
}

}  // namespace

ApsidalResult apsidal_angle(const Params& params, double E, double J, const QuadratureOptions& opts) {
    if (J == 0.0)
        throw DomainError("apsidal angle needs J != 0");
    const auto tp = noncircular_turning_points(params, E, J);
    const double m = params.mass();
    const double s = params.scale();
    const double lambda = std::abs(J) / s;
    const auto q = radial_integral(
        params, J, tp, [&](double r, double gap) { return (lambda / (m * r * r)) / std::sqrt(2.0 * gap / m); },
        opts);
    return ApsidalResult{q.value / s, lambda, E, q.error_estimate};
}

double radial_period(const Params& params, double E, double J, const QuadratureOptions& opts) {
    const auto tp = noncircular_turning_points(params, E, J);
    const double m = params.mass();
    const auto q = radial_integral(
        params, J, tp, [&](double, double gap) { return 1.0 / std::sqrt(2.0 * gap / m); }, opts);
    return 2.0 * q.value;
}

CircularOrbit circular_orbit(const Params& params, double J) {
    if (J == 0.0)
        throw StructuralError("circular orbits need J != 0");
    const auto [rc, U0] = effective_minimum(params, J);
    return {rc, U0};
}

SmallOscillation small_oscillation_freq(const Params& params, double J) {
    const double rc = circular_orbit(params, J).r_c;
    const double d1 = params.dV(rc);
    if (d1 == 0.0)
        throw DegenerateError("V'(r_c) vanishes");
    const double omega_sq = 3.0 + rc * params.d2V(rc) / d1;
    if (!(omega_sq > 0.0))
        throw DegenerateError("circular orbit is not stable (omega^2 <= 0)");
    return {omega_sq, kPi / (params.scale() * std::sqrt(omega_sq))};
}

WidthLawFit width_law_check(const Params& params, double J, int n_levels, std::optional<double> U_cap) {
    if (n_levels < 2)
        throw DomainError("width law fit needs at least two levels");
    if (J == 0.0)
        throw DomainError("width law needs J != 0");
    const auto minima = effective_minima(params, J);
    if (minima.empty())
        throw StructuralError("effective potential has no minimum");
    if (minima.size() > 1)
        throw StructuralError("non-unique minimum: the effective potential has " + std::to_string(minima.size()) +
                              " local minima");
    const double U0 = minima.front().U0;

    double cap = U_cap.value_or(U0 == 0.0 ? U0 + 10.0 : U0 + 10.0 * std::abs(U0));
    if (!U_cap) {
        if (const auto top = escape_energy(params); top && cap >= *top)
            cap = U0 + 0.9 * (*top - U0);
    }
    if (!(cap > U0))
        throw DomainError("width law cap must lie above the minimum");

    const double m = params.mass();
    const double lambda = std::abs(J) / params.scale();
    WidthLawFit fit;
    fit.U0 = U0;
    fit.U_cap = cap;
    for (int i = 1; i <= n_levels; ++i) {
        const double dU = (cap - U0) * static_cast<double>(i) / n_levels;
        const auto tp = turning_points(params, U0 + dU, J);
        // x = lambda / (m r): the inner x-root comes from r_max
        const double width = (lambda / m) * (tp.r_max - tp.r_min) / (tp.r_min * tp.r_max);
        fit.levels.push_back(dU);
        fit.widths.push_back(width);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fit.levels.size(); ++i) {
        const double q = std::sqrt(fit.levels[i]);
        num += fit.widths[i] * q;
        den += q * q;
    }
    fit.a_fit = num / den;
    for (std::size_t i = 0; i < fit.levels.size(); ++i) {
        const double resid = std::abs(fit.widths[i] - fit.a_fit * std::sqrt(fit.levels[i])) / fit.widths[i];
        fit.max_residual = std::max(fit.max_residual, resid);
    }
    return fit;
}

std::string to_string(CellStatus s) {
    switch (s) {
        case CellStatus::ok: return "ok";
        case CellStatus::infeasible: return "infeasible";
        case CellStatus::failed: return "failed";
    }
    return "unknown";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::closed_orbit_candidate: return "closed_orbit_candidate";
        case Verdict::rejected: return "rejected";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::no_data: return "no_data";
    }
    return "unknown";
}

ScanReport scan_potential(const Params& params, const EnergyGrid& energies, const std::vector<double>& lambdas,
                          const ScanThresholds& thresholds, const QuadratureOptions& opts) {
    ScanReport report;
    const auto& pot = params.potential();
    if (const auto* lg = std::get_if<LogPotential>(&pot)) {
        report.family = "log";
        report.family_param = lg->B;
    } else {
        report.family = "power_law";
        report.family_param = to_power_law(pot, params.mass())->alpha;
    }
    const double s = params.scale();
    const auto top = escape_energy(params);

    std::optional<double> expected;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    for (const double lambda : lambdas) {
        const double J = lambda * s;
        std::optional<CircularOrbit> circ;
        std::string circ_error;
        try {
            circ = circular_orbit(params, J);
            if (!expected)
                expected = s * small_oscillation_freq(params, J).apsidal_limit;
        } catch (const Error& e) {
            circ_error = e.what();
        }
        for (const double value : energies.values) {
            ScanCell cell;
            cell.lambda = lambda;
            if (energies.mode == EnergyGrid::Mode::absolute) {
                cell.E = value;
            } else if (circ) {
                const double E_c = circ->E_c;
                const double E_top = top ? *top : (E_c == 0.0 ? E_c + 10.0 : E_c + 10.0 * std::abs(E_c));
                cell.E = E_c + value * (E_top - E_c);
            } else {
                cell.E = std::numeric_limits<double>::quiet_NaN();
            }
            if (!circ) {
                cell.status = CellStatus::infeasible;
                cell.message = circ_error;
            } else {
                try {
                    const auto res = apsidal_angle(params, cell.E, J, opts);
                    cell.s_delta_phi = s * res.delta_phi;
                    if (res.quadrature_error_estimate > opts.tolerance) {
                        cell.status = CellStatus::failed;
                        cell.message = "quadrature did not converge";
                    }
                } catch (const UnboundedError& e) {
                    cell.status = CellStatus::infeasible;
                    cell.message = e.what();
                } catch (const ForbiddenError& e) {
                    cell.status = CellStatus::infeasible;
                    cell.message = e.what();
                } catch (const Error& e) {
                    cell.status = CellStatus::failed;
                    cell.message = e.what();
                }
            }
            if (cell.status == CellStatus::ok) {
                ++report.feasible;
                lo = std::min(lo, cell.s_delta_phi);
                hi = std::max(hi, cell.s_delta_phi);
                sum += cell.s_delta_phi;
            }
            report.cells.push_back(std::move(cell));
        }
    }

    if (report.feasible == 0) {
        report.verdict = Verdict::no_data;
        return report;
    }
    report.flatness = hi - lo;
    report.constant = sum / report.feasible;
    report.expected_constant = expected.value_or(std::numeric_limits<double>::quiet_NaN());
    if (report.flatness < thresholds.pass_flatness &&
        std::abs(report.constant - report.expected_constant) < thresholds.constant_tolerance)
        report.verdict = Verdict::closed_orbit_candidate;
    else if (report.flatness > thresholds.fail_flatness)
        report.verdict = Verdict::rejected;
    else
        report.verdict = Verdict::inconclusive;
    return report;
}

std::vector<ScanReport> bertrand_scan(const std::vector<double>& exponents, double amplitude, double mass,
                                      const ConeGeometry& geometry, const EnergyGrid& energies,
                                      const std::vector<double>& lambdas, const ScanThresholds& thresholds,
                                      const QuadratureOptions& opts) {
    std::vector<ScanReport> out;
    out.reserve(exponents.size());
    for (const double alpha : exponents) {
        const double A = (alpha < 0.0 ? -1.0 : 1.0) * std::abs(amplitude);
        const Params params(mass, geometry, PowerLaw(A, alpha));
        out.push_back(scan_potential(params, energies, lambdas, thresholds, opts));
    }
    return out;
}

}  // namespace cone
