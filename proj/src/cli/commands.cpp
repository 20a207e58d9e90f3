#include "cone/cli/commands.hpp"

#include "cone/actions.hpp"
#include "cone/bertrand.hpp"
#include "cone/dynamics.hpp"
#include "cone/symmetry.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

namespace cone::cli {

using nlohmann::json;

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open output file '" + path + "'");
    return out;
}

std::string resolve_output(const RunConfig& config, const std::string& command, OutputFormat format) {
    return config.output.path.empty() ? default_output_path(command, format) : config.output.path;
}

bool has_global_integral(const Params& params) {
    const auto& pot = params.potential();
    return params.geometry().is_rational() &&
           (std::holds_alternative<Kepler>(pot) || std::holds_alternative<Oscillator>(pot));
}

PhasePoint initial_point(const RunConfig& config, const Params& params) {
    if (!config.initial)
        throw ConfigError("initial", "simulate needs an initial state ({r, phi, p_r, J} or {E, J})");
    if (const auto* st = std::get_if<PhaseState>(&*config.initial))
        return PhasePoint(st->r, st->phi, st->p_r, st->J);
    const auto& lv = std::get<EnergyLevel>(*config.initial);
    const auto tp = turning_points(params, lv.E, lv.J);
    return PhasePoint(tp.r_min, 0.0, 0.0, lv.J);
}

/// Random phase point on a bound Kepler or oscillator orbit.
PhasePoint sample_bound_point(const Params& params, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    const double J = sign * (0.5 + unit(rng));
    const double E_c = circular_orbit(params, J).E_c;
    const double E = std::holds_alternative<Kepler>(params.potential()) ? E_c * (0.15 + 0.75 * unit(rng))
                                                                         : E_c * (1.05 + 2.0 * unit(rng));
    const auto tp = turning_points(params, E, J);
    const double r = tp.r_min + (tp.r_max - tp.r_min) * (0.02 + 0.96 * unit(rng));
    const double gap = E - effective_potential(params, J, r);
    const double p = (unit(rng) < 0.5 ? -1.0 : 1.0) * std::sqrt(2.0 * params.mass() * std::max(gap, 0.0));
    return PhasePoint(r, kTwoPi * unit(rng), p, J);
}

json level_record(double E, double J) {
    return json{{"E", E}, {"J", J}};
}

}  // namespace

std::string format_double(double v) {
    return fmt::format("{:.17g}", v);
}

std::string default_output_path(const std::string& command, OutputFormat format) {
    return "cone_" + command + "." + to_string(format);
}

json RunSummary::to_json() const {
    return json{{"command", command},   {"wall_time_s", wall_time_s}, {"seed", seed},
                {"output", output_path}, {"results", results},        {"exit_status", exit_status}};
}

// ---------------------------------------------------------------------------

RunSummary cmd_simulate(const RunConfig& config) {
    RunSummary summary;
    summary.command = "simulate";
    summary.seed = config.seed;
    const Params params = config.params.build();
    if (params.geometry().excess_angle())
        spdlog::warn("scale factor s = {} > 1: excess-angle cone (not physical, still well-defined)", params.scale());

    PhasePoint pt0 = initial_point(config, params);
    const auto& ic = config.integrator;
    Trajectory traj = integrate(params, pt0, ic.dt, ic.n_steps, ic.sample_every);

    const bool with_z = has_global_integral(params);
    const auto fmt_format = config.output.format;
    summary.output_path = resolve_output(config, summary.command, fmt_format);
    auto out = open_output(summary.output_path);

    const double H0 = traj.series_H.front();
    const double J0 = traj.series_J.front();
    Complex Z0{};
    if (with_z)
        Z0 = global_Z(params, traj.points.front()).value;
    double max_dH = 0.0, max_dJ = 0.0, max_dZ = 0.0;

    if (fmt_format == OutputFormat::csv)
        out << (with_z ? "t,r,phi,p_r,J,H,Z_re,Z_im\n" : "t,r,phi,p_r,J,H\n");
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& p = traj.points[i];
        const double H = traj.series_H[i];
        max_dH = std::max(max_dH, std::abs(H - H0));
        max_dJ = std::max(max_dJ, std::abs(traj.series_J[i] - J0));
        Complex Z{};
        if (with_z) {
            Z = global_Z(params, p).value;
            max_dZ = std::max(max_dZ, std::abs(Z - Z0));
        }
        if (fmt_format == OutputFormat::csv) {
            out << format_double(traj.times[i]) << ',' << format_double(p.r()) << ',' << format_double(p.phi()) << ','
                << format_double(p.p_r()) << ',' << format_double(p.J()) << ',' << format_double(H);
            if (with_z)
                out << ',' << format_double(Z.real()) << ',' << format_double(Z.imag());
            out << '\n';
        } else {
            json row = {{"t", traj.times[i]}, {"r", p.r()}, {"phi", p.phi()}, {"p_r", p.p_r()}, {"J", p.J()}, {"H", H}};
            if (with_z) {
                row["Z_re"] = Z.real();
                row["Z_im"] = Z.imag();
            }
            out << row.dump() << '\n';
        }
    }

    json results;
    results["samples"] = traj.size();
    results["H0"] = H0;
    results["max_rel_drift_H"] = max_dH / std::max(std::abs(H0), 1e-300);
    results["max_drift_J"] = max_dJ;
    if (with_z)
        results["max_rel_drift_Z"] = max_dZ / std::max(std::abs(Z0), 1e-12);
    if (ic.detect_closure) {
        if (pt0.J() == 0.0) {
            results["closure"] = "not applicable (J = 0)";
        } else if (const auto c = detect_closure(traj, ic.closure_tol)) {
            results["closure"] = fmt::format("closed after {} radial periods", c->radial_periods);
            results["closure_time"] = c->time;
            results["closure_radial_periods"] = c->radial_periods;
            results["closure_windings"] = c->windings;
        } else {
            results["closure"] = "no closure found";
        }
    }
    summary.results = results;
    return summary;
}

RunSummary cmd_bertrand(const RunConfig& config) {
    RunSummary summary;
    summary.command = "bertrand";
    summary.seed = config.seed;
    if (!config.scan)
        throw ConfigError("scan", "bertrand needs a scan section");
    const auto& sc = *config.scan;
    const Params base = config.params.build();
    const double s = base.scale();

    auto reports = bertrand_scan(sc.exponents, sc.amplitude, base.mass(), base.geometry(), sc.energies, sc.lambdas,
                                 {}, config.quadrature);
    std::vector<Params> members;
    for (const double alpha : sc.exponents)
        members.emplace_back(base.mass(), base.geometry(),
                             PowerLaw((alpha < 0.0 ? -1.0 : 1.0) * sc.amplitude, alpha));
    if (sc.log_potential) {
        members.emplace_back(base.mass(), base.geometry(), LogPotential(sc.log_B, sc.log_r0));
        reports.push_back(scan_potential(members.back(), sc.energies, sc.lambdas, {}, config.quadrature));
    }

    summary.output_path = resolve_output(config, summary.command, config.output.format);
    auto out = open_output(summary.output_path);
    if (config.output.format == OutputFormat::csv)
        out << "family_param,E,lambda,s_delta_phi,status\n";

    int feasible = 0;
    json member_results = json::array();
    json passing = json::array();
    for (std::size_t m = 0; m < reports.size(); ++m) {
        const auto& rep = reports[m];
        const bool is_log = rep.family == "log";
        const std::string param = is_log ? "log" : format_double(rep.family_param);
        for (const auto& cell : rep.cells) {
            if (config.output.format == OutputFormat::csv) {
                out << param << ',' << format_double(cell.E) << ',' << format_double(cell.lambda) << ','
                    << format_double(cell.s_delta_phi) << ',' << to_string(cell.status) << '\n';
            } else {
                json row = {{"family_param", is_log ? json("log") : json(rep.family_param)},
                            {"E", cell.E},
                            {"lambda", cell.lambda},
                            {"s_delta_phi", cell.s_delta_phi},
                            {"status", to_string(cell.status)}};
                out << row.dump() << '\n';
            }
        }
        feasible += rep.feasible;

        json mr = {{"family", rep.family},
                   {"family_param", rep.family_param},
                   {"feasible_cells", rep.feasible},
                   {"flatness", rep.flatness},
                   {"constant", rep.constant},
                   {"expected_constant", rep.expected_constant},
                   {"verdict", to_string(rep.verdict)}};
        try {
            const auto fit = width_law_check(members[m], sc.lambdas.front() * s, sc.width_law_levels);
            mr["width_law"] = {{"a_fit", fit.a_fit}, {"max_residual", fit.max_residual}};
            if (is_log)
                summary.results["log_width_law_residual"] = fit.max_residual;
        } catch (const Error& e) {
            mr["width_law"] = {{"error", e.what()}};
        }
        if (!is_log && rep.verdict == Verdict::closed_orbit_candidate)
            passing.push_back(rep.family_param);
        member_results.push_back(mr);
        spdlog::info("{} {}: flatness {:.3e}, verdict {}", rep.family, param, rep.flatness, to_string(rep.verdict));
    }
    summary.results["members"] = member_results;
    summary.results["passing_exponents"] = passing;
    if (feasible == 0) {
        spdlog::error("every scan cell is infeasible");
        summary.exit_status = kExitScanInfeasible;
    }
    return summary;
}

RunSummary cmd_actions(const RunConfig& config) {
    RunSummary summary;
    summary.command = "actions";
    summary.seed = config.seed;
    if (config.levels.empty())
        throw ConfigError("levels", "actions needs at least one {E, J} level");
    const Params params = config.params.build();
    const bool closed_form =
        std::holds_alternative<Kepler>(params.potential()) || std::holds_alternative<Oscillator>(params.potential());

    if (config.output.format != OutputFormat::jsonl)
        spdlog::warn("actions writes JSON records; ignoring format {}", to_string(config.output.format));
    summary.output_path = resolve_output(config, summary.command, OutputFormat::jsonl);
    auto out = open_output(summary.output_path);

    int ok = 0;
    double worst_roundtrip = 0.0;
    json ratios = json::array();
    for (const auto& lv : config.levels) {
        json rec = level_record(lv.E, lv.J);
        try {
            const auto data = frequencies(params, lv.E, lv.J, config.rationality, config.quadrature);
            rec["I1"] = data.I1;
            rec["I2"] = data.I2;
            rec["omega1"] = data.omega1;
            rec["omega2"] = data.omega2;
            rec["ratio"] = data.ratio;
            if (data.rational_approx)
                rec["rational_approx"] = {{"p", data.rational_approx->p},
                                          {"q", data.rational_approx->q},
                                          {"error", data.rational_approx->error}};
            else
                rec["rational_approx"] = nullptr;
            if (closed_form) {
                const double H = hamiltonian_from_actions(params, data.I1, data.I2);
                const double rel = std::abs(H - lv.E) / std::max(std::abs(lv.E), 1e-300);
                rec["H_from_actions"] = H;
                rec["H_rel_err"] = rel;
                worst_roundtrip = std::max(worst_roundtrip, rel);
            }
            ratios.push_back(rec["rational_approx"].is_null()
                                 ? json(format_double(data.ratio))
                                 : json(fmt::format("{} ~ {}/{}", format_double(data.ratio), data.rational_approx->p,
                                                    data.rational_approx->q)));
            ++ok;
        } catch (const Error& e) {
            rec["error"] = e.what();
            spdlog::warn("level E={} J={}: {}", lv.E, lv.J, e.what());
        }
        out << rec.dump() << '\n';
    }
    summary.results["records_ok"] = ok;
    summary.results["records_failed"] = static_cast<int>(config.levels.size()) - ok;
    summary.results["ratios"] = ratios;
    if (closed_form)
        summary.results["max_H_roundtrip_rel_err"] = worst_roundtrip;
    if (ok == 0)
        summary.exit_status = kExitDynamics;
    return summary;
}

RunSummary cmd_verify_algebra(const RunConfig& config) {
    RunSummary summary;
    summary.command = "verify-algebra";
    summary.seed = config.seed;
    const Params params = config.params.build();
    if (!params.geometry().is_rational()) {
        spdlog::error("irrational scale factor: Z = C^n needs s = k/n; only the multi-valued local C exists");
        summary.results["error"] =
            "irrational s: no single-valued power of the local integral C exists; give params.ratio = [k, n]";
        summary.exit_status = kExitIrrationalScale;
        return summary;
    }

    if (config.output.format != OutputFormat::jsonl)
        spdlog::warn("verify-algebra writes JSON records; ignoring format {}", to_string(config.output.format));
    summary.output_path = resolve_output(config, summary.command, OutputFormat::jsonl);
    auto out = open_output(summary.output_path);

    std::mt19937_64 rng(config.seed);
    std::map<std::string, double> worst;
    std::vector<std::string> order;
    int richardson_disagreements = 0;
    for (int i = 0; i < config.algebra.points; ++i) {
        const PhasePoint pt = sample_bound_point(params, rng);
        const auto report = verify_w_algebra(params, pt, config.algebra.h);
        for (const auto& e : report.entries) {
            if (!worst.contains(e.bracket)) {
                order.push_back(e.bracket);
                worst[e.bracket] = 0.0;
            }
            worst[e.bracket] = std::max(worst[e.bracket], e.rel_err);
            if (!e.richardson_agrees && e.expected != Complex{})
                ++richardson_disagreements;
            json row = {{"point", i},
                        {"bracket", e.bracket},
                        {"value_re", e.value.real()},
                        {"value_im", e.value.imag()},
                        {"expected_re", e.expected.real()},
                        {"expected_im", e.expected.imag()},
                        {"abs_err", e.abs_err},
                        {"rel_err", e.rel_err},
                        {"h", report.h}};
            out << row.dump() << '\n';
        }
    }

    json worst_json = json::object();
    for (const auto& name : order)
        worst_json[name] = worst[name];
    summary.results["worst_rel_err"] = worst_json;
    summary.results["richardson_disagreements"] = richardson_disagreements;
    summary.results["points"] = config.algebra.points;

    // which closed form for {Z, Zbar} the numeric bracket follows
    json matches = json::array();
    for (const auto& name : order)
        if (name.rfind("{Z,Zbar}", 0) == 0 && worst[name] < 1e-5)
            matches.push_back(name);
    summary.results["zzbar_matching_forms"] = matches;
    summary.results["max_bracket_error"] = std::max(worst["{J,Z} canonical phase"], worst["{J,Zbar} canonical phase"]);
    return summary;
}

RunSummary run_command(const std::string& name, const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    if (name == "simulate")
        summary = cmd_simulate(config);
    else if (name == "bertrand")
        summary = cmd_bertrand(config);
    else if (name == "actions")
        summary = cmd_actions(config);
    else if (name == "verify-algebra")
        summary = cmd_verify_algebra(config);
    else
        throw ConfigError("<command>", "unknown subcommand '" + name + "'");
    summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

}  // namespace cone::cli
