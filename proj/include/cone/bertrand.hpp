#pragma once

#include "cone/core.hpp"
#include "cone/dynamics.hpp"
#include "cone/numerics.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace cone {

using numerics::QuadratureOptions;
using numerics::QuadratureResult;

/// Integral of weight(r, gap) dr over one sweep r_min -> r_max, gap = E - U_eff(r).
///
/// The substitution r = rbar - rho cos(theta) turns the inverse square-root endpoint
/// behaviour of 1/sqrt(gap) into a smooth integrand. The gap is taken as a difference
/// of U_eff from the nearer turning point, so it keeps full relative precision at the
/// nodes closest to either end.
template <class Weight>
QuadratureResult radial_integral(const Params& params, double J, const TurningPoints& tp, Weight&& weight,
                                 const QuadratureOptions& opts = {}) {
    const double rho = 0.5 * (tp.r_max - tp.r_min);
    auto integrand = [&](double theta) {
        const double sh = std::sin(0.5 * theta);
        const double ch = std::cos(0.5 * theta);
        double r, gap;
        if (theta < 0.5 * kPi) {
            const double d = 2.0 * rho * sh * sh;
            r = tp.r_min + d;
            gap = -effective_potential_difference(params, J, tp.r_min, d);
        } else {
            const double d = 2.0 * rho * ch * ch;
            r = tp.r_max - d;
            gap = -effective_potential_difference(params, J, tp.r_max, -d);
        }
        return weight(r, gap) * rho * std::sin(theta);
    };
    return numerics::integrate_doubling(integrand, 0.0, kPi, opts);
}

struct ApsidalResult {
    double delta_phi = 0.0;  ///< phi advance from pericentre to apocentre
    double lambda = 0.0;     ///< |J| / s
    double E = 0.0;
    double quadrature_error_estimate = 0.0;
};

/// Pericentre-to-apocentre advance of phi. s * delta_phi depends on (E, lambda) only.
/// DegenerateError for (near-)circular input: use small_oscillation_freq there.
ApsidalResult apsidal_angle(const Params& params, double E, double J, const QuadratureOptions& opts = {});

/// Full radial period T = 2 * integral dr / sqrt((2/m)(E - U_eff)).
double radial_period(const Params& params, double E, double J, const QuadratureOptions& opts = {});

struct CircularOrbit {
    double r_c = 0.0;
    double E_c = 0.0;
};

/// r_c solving J^2 / (m s^2 r^3) = V'(r), and E_c = U_eff(r_c).
CircularOrbit circular_orbit(const Params& params, double J);

struct SmallOscillation {
    double omega_sq = 0.0;       ///< 3 + r V''/V' at r_c (dimensionless)
    double apsidal_limit = 0.0;  ///< pi / (s sqrt(omega_sq))
};

SmallOscillation small_oscillation_freq(const Params& params, double J);

struct WidthLawFit {
    double a_fit = 0.0;
    double max_residual = 0.0;
    double U0 = 0.0;
    double U_cap = 0.0;
    std::vector<double> levels;  ///< U - U0 at each sampled level
    std::vector<double> widths;  ///< x2(U) - x1(U) with x = lambda / (m r)
};

/// Fit the well width in x = lambda / (m r) against a sqrt(U - U0) over n_levels energies
/// in (U0, U_cap]. A vanishing residual is the energy-independent-period condition.
/// U_cap defaults to U0 + 10|U0| (U0 + 10 when U0 = 0), clipped to 90% of the way to the
/// escape energy for potentials that level off at infinity.
WidthLawFit width_law_check(const Params& params, double J, int n_levels,
                            std::optional<double> U_cap = std::nullopt);

// ---------------------------------------------------------------------------
// Scan
// ---------------------------------------------------------------------------

/// Energies of a scan, either absolute or as fractions f in (0, 1) of the way from the
/// circular energy E_c(lambda) to the top of the bound range (the escape energy, or the
/// width-law cap for confining potentials).
struct EnergyGrid {
    enum class Mode { absolute, relative };
    Mode mode = Mode::relative;
    std::vector<double> values;
    friend bool operator==(const EnergyGrid&, const EnergyGrid&) = default;
};

enum class CellStatus { ok, infeasible, failed };
enum class Verdict { closed_orbit_candidate, rejected, inconclusive, no_data };

std::string to_string(CellStatus s);
std::string to_string(Verdict v);

struct ScanCell {
    double E = 0.0;
    double lambda = 0.0;
    double s_delta_phi = 0.0;
    CellStatus status = CellStatus::ok;
    std::string message;
};

struct ScanThresholds {
    double pass_flatness = 1e-6;
    double fail_flatness = 1e-3;
    double constant_tolerance = 1e-6;
};

struct ScanReport {
    std::string family;         ///< "power_law" or "log"
    double family_param = 0.0;  ///< exponent alpha (power law) or B (log)
    std::vector<ScanCell> cells;
    int feasible = 0;
    double flatness = 0.0;  ///< max - min of s * delta_phi over feasible cells
    double constant = 0.0;  ///< mean of s * delta_phi over feasible cells
    double expected_constant = 0.0;  ///< near-circular limit pi / sqrt(omega^2)
    Verdict verdict = Verdict::no_data;
};

/// s * delta_phi over the (E, lambda) grid for one potential.
ScanReport scan_potential(const Params& params, const EnergyGrid& energies, const std::vector<double>& lambdas,
                          const ScanThresholds& thresholds = {}, const QuadratureOptions& opts = {});

/// Scan the attractive power laws V = sign(alpha) * amplitude * r^alpha over the exponents.
std::vector<ScanReport> bertrand_scan(const std::vector<double>& exponents, double amplitude, double mass,
                                      const ConeGeometry& geometry, const EnergyGrid& energies,
                                      const std::vector<double>& lambdas, const ScanThresholds& thresholds = {},
                                      const QuadratureOptions& opts = {});

}  // namespace cone
