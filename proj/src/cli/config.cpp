#include "cone/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace cone::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object())
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    require_object(j, path);
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; });
        if (!known)
            throw ConfigError(join(path, item.key()), "unknown key");
    }
}

double number(const json& j, const std::string& key, const std::string& path, std::optional<double> def = {}) {
    const auto it = j.find(key);
    if (it == j.end()) {
        if (def)
            return *def;
        throw ConfigError(join(path, key), "required field is missing");
    }
    if (!it->is_number())
        throw ConfigError(join(path, key), "expected a number");
    const double v = it->get<double>();
    if (!std::isfinite(v))
        throw ConfigError(join(path, key), "must be finite");
    return v;
}

std::uint64_t unsigned_integer(const json& j, const std::string& key, const std::string& path,
                               std::optional<std::uint64_t> def = {}) {
    const auto it = j.find(key);
    if (it == j.end()) {
        if (def)
            return *def;
        throw ConfigError(join(path, key), "required field is missing");
    }
    if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() && it->get<long long>() < 0))
        throw ConfigError(join(path, key), "expected a non-negative integer");
    return it->get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& key, const std::string& path, bool def) {
    const auto it = j.find(key);
    if (it == j.end())
        return def;
    if (!it->is_boolean())
        throw ConfigError(join(path, key), "expected true or false");
    return it->get<bool>();
}

std::vector<double> number_list(const json& j, const std::string& key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end())
        throw ConfigError(join(path, key), "required field is missing");
    if (!it->is_array() || it->empty())
        throw ConfigError(join(path, key), "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& v = (*it)[i];
        const std::string p = join(path, key) + "[" + std::to_string(i) + "]";
        if (!v.is_number() || !std::isfinite(v.get<double>()))
            throw ConfigError(p, "expected a finite number");
        out.push_back(v.get<double>());
    }
    return out;
}

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok)
        throw ConfigError(path, message);
}

/// Run a constructor that validates its arguments, re-raising as a ConfigError at `path`.
template <class F>
auto guarded(const std::string& path, F&& make) {
    try {
        return make();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

Potential parse_potential(const json& j, const std::string& path) {
    require_object(j, path);
    const auto type_it = j.find("type");
    if (type_it == j.end() || !type_it->is_string())
        throw ConfigError(join(path, "type"), "expected one of kepler, oscillator, power_law, log");
    const std::string type = type_it->get<std::string>();
    if (type == "kepler") {
        check_keys(j, path, {"type", "kappa"});
        const double kappa = number(j, "kappa", path);
        return guarded(join(path, "kappa"), [&] { return Potential(Kepler(kappa)); });
    }
    if (type == "oscillator") {
        check_keys(j, path, {"type", "omega"});
        const double omega = number(j, "omega", path);
        return guarded(join(path, "omega"), [&] { return Potential(Oscillator(omega)); });
    }
    if (type == "power_law") {
        check_keys(j, path, {"type", "A", "alpha"});
        const double A = number(j, "A", path);
        const double alpha = number(j, "alpha", path);
        return guarded(join(path, "alpha"), [&] { return Potential(PowerLaw(A, alpha)); });
    }
    if (type == "log") {
        check_keys(j, path, {"type", "B", "r0"});
        const double B = number(j, "B", path);
        const double r0 = number(j, "r0", path, 1.0);
        return guarded(path, [&] { return Potential(LogPotential(B, r0)); });
    }
    throw ConfigError(join(path, "type"), "unknown potential type '" + type + "'");
}

json potential_to_json(const Potential& pot) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Kepler>)
                return {{"type", "kepler"}, {"kappa", p.kappa}};
            else if constexpr (std::is_same_v<T, Oscillator>)
                return {{"type", "oscillator"}, {"omega", p.omega}};
            else if constexpr (std::is_same_v<T, PowerLaw>)
                return {{"type", "power_law"}, {"A", p.A}, {"alpha", p.alpha}};
            else
                return {{"type", "log"}, {"B", p.B}, {"r0", p.r0}};
        },
        pot);
}

ParamsConfig parse_params(const json& j) {
    const std::string path = "params";
    check_keys(j, path, {"mass", "s", "ratio", "potential"});
    ParamsConfig out;
    out.mass = number(j, "mass", path, 1.0);
    require(out.mass > 0.0, join(path, "mass"), "must be positive");
    const bool has_s = j.contains("s");
    const bool has_ratio = j.contains("ratio");
    require(!(has_s && has_ratio), path, "give either s or ratio, not both");
    if (has_ratio) {
        const auto& r = j.at("ratio");
        const std::string rp = join(path, "ratio");
        require(r.is_array() && r.size() == 2 && r[0].is_number_integer() && r[1].is_number_integer(), rp,
                "expected [k, n] with positive integers");
        const auto k = r[0].get<long long>();
        const auto n = r[1].get<long long>();
        require(k > 0 && n > 0 && k < 1000000 && n < 1000000, rp, "k and n must be positive integers below 1e6");
        const auto g = ConeGeometry::from_ratio(static_cast<int>(k), static_cast<int>(n));
        out.scale = *g.ratio();
    } else {
        const double s = number(j, "s", path, 1.0);
        require(s > 0.0, join(path, "s"), "scale factor must be positive");
        out.scale = s;
    }
    if (!j.contains("potential"))
        throw ConfigError(join(path, "potential"), "required field is missing");
    out.potential = parse_potential(j.at("potential"), join(path, "potential"));
    return out;
}

std::variant<PhaseState, EnergyLevel> parse_initial(const json& j) {
    const std::string path = "initial";
    require_object(j, path);
    if (j.contains("E")) {
        check_keys(j, path, {"E", "J"});
        return EnergyLevel{number(j, "E", path), number(j, "J", path)};
    }
    check_keys(j, path, {"r", "phi", "p_r", "J"});
    PhaseState st{number(j, "r", path), number(j, "phi", path, 0.0), number(j, "p_r", path, 0.0),
                  number(j, "J", path)};
    require(st.r > 0.0, join(path, "r"), "radius must be positive (the tip r = 0 is excluded)");
    return st;
}

IntegratorConfig parse_integrator(const json& j) {
    const std::string path = "integrator";
    check_keys(j, path, {"dt", "n_steps", "sample_every", "detect_closure", "closure_tol"});
    IntegratorConfig c;
    c.dt = number(j, "dt", path, c.dt);
    require(c.dt != 0.0, join(path, "dt"), "must be non-zero");
    c.n_steps = unsigned_integer(j, "n_steps", path, c.n_steps);
    require(c.n_steps >= 1, join(path, "n_steps"), "must be at least 1");
    c.sample_every = unsigned_integer(j, "sample_every", path, c.sample_every);
    require(c.sample_every >= 1, join(path, "sample_every"), "must be at least 1");
    c.detect_closure = boolean(j, "detect_closure", path, c.detect_closure);
    c.closure_tol = number(j, "closure_tol", path, c.closure_tol);
    require(c.closure_tol > 0.0, join(path, "closure_tol"), "must be positive");
    return c;
}

numerics::QuadratureOptions parse_quadrature(const json& j) {
    const std::string path = "quadrature";
    check_keys(j, path, {"tolerance", "min_order", "max_refinements"});
    numerics::QuadratureOptions q;
    q.tolerance = number(j, "tolerance", path, q.tolerance);
    require(q.tolerance > 0.0, join(path, "tolerance"), "must be positive");
    q.min_order = static_cast<int>(unsigned_integer(j, "min_order", path, static_cast<std::uint64_t>(q.min_order)));
    require(q.min_order >= 2 && q.min_order <= 1024, join(path, "min_order"), "must lie in [2, 1024]");
    q.max_refinements =
        static_cast<int>(unsigned_integer(j, "max_refinements", path, static_cast<std::uint64_t>(q.max_refinements)));
    require(q.max_refinements >= 1 && q.max_refinements <= 10, join(path, "max_refinements"), "must lie in [1, 10]");
    return q;
}

ScanConfig parse_scan(const json& j) {
    const std::string path = "scan";
    check_keys(j, path, {"exponents", "amplitude", "energies", "lambdas", "log_potential", "width_law_levels"});
    ScanConfig c;
    c.exponents = number_list(j, "exponents", path);
    for (std::size_t i = 0; i < c.exponents.size(); ++i) {
        const std::string p = join(path, "exponents") + "[" + std::to_string(i) + "]";
        require(c.exponents[i] > -2.0, p, "power-law exponent must exceed -2");
        require(c.exponents[i] != 0.0, p, "exponent 0 is the constant potential (use log_potential)");
    }
    c.amplitude = number(j, "amplitude", path, 1.0);
    require(c.amplitude > 0.0, join(path, "amplitude"), "must be positive");

    const std::string ep = join(path, "energies");
    if (!j.contains("energies"))
        throw ConfigError(ep, "required field is missing");
    const auto& e = j.at("energies");
    check_keys(e, ep, {"mode", "values"});
    const std::string mode = e.value("mode", std::string("relative"));
    if (mode == "relative")
        c.energies.mode = EnergyGrid::Mode::relative;
    else if (mode == "absolute")
        c.energies.mode = EnergyGrid::Mode::absolute;
    else
        throw ConfigError(join(ep, "mode"), "expected relative or absolute");
    c.energies.values = number_list(e, "values", ep);
    if (c.energies.mode == EnergyGrid::Mode::relative)
        for (std::size_t i = 0; i < c.energies.values.size(); ++i)
            require(c.energies.values[i] > 0.0 && c.energies.values[i] < 1.0,
                    join(ep, "values") + "[" + std::to_string(i) + "]", "relative energies must lie in (0, 1)");

    c.lambdas = number_list(j, "lambdas", path);
    for (std::size_t i = 0; i < c.lambdas.size(); ++i)
        require(c.lambdas[i] > 0.0, join(path, "lambdas") + "[" + std::to_string(i) + "]", "must be positive");

    if (j.contains("log_potential")) {
        const std::string lp = join(path, "log_potential");
        const auto& l = j.at("log_potential");
        check_keys(l, lp, {"B", "r0"});
        c.log_potential = true;
        c.log_B = number(l, "B", lp, 1.0);
        c.log_r0 = number(l, "r0", lp, 1.0);
        guarded(lp, [&] { return LogPotential(c.log_B, c.log_r0); });
    }
    c.width_law_levels =
        static_cast<int>(unsigned_integer(j, "width_law_levels", path, static_cast<std::uint64_t>(c.width_law_levels)));
    require(c.width_law_levels >= 2, join(path, "width_law_levels"), "must be at least 2");
    return c;
}

std::vector<EnergyLevel> parse_levels(const json& j) {
    if (!j.is_array())
        throw ConfigError("levels", "expected an array of {E, J} objects");
    std::vector<EnergyLevel> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = "levels[" + std::to_string(i) + "]";
        check_keys(j[i], p, {"E", "J"});
        out.push_back({number(j[i], "E", p), number(j[i], "J", p)});
    }
    return out;
}

RationalityOptions parse_rationality(const json& j) {
    const std::string path = "rationality";
    check_keys(j, path, {"q_max", "tolerance"});
    RationalityOptions r;
    r.q_max = static_cast<long>(unsigned_integer(j, "q_max", path, static_cast<std::uint64_t>(r.q_max)));
    require(r.q_max >= 1, join(path, "q_max"), "must be at least 1");
    r.tolerance = number(j, "tolerance", path, r.tolerance);
    require(r.tolerance > 0.0, join(path, "tolerance"), "must be positive");
    return r;
}

AlgebraConfig parse_algebra(const json& j) {
    const std::string path = "algebra";
    check_keys(j, path, {"points", "h"});
    AlgebraConfig a;
    a.points = static_cast<int>(unsigned_integer(j, "points", path, static_cast<std::uint64_t>(a.points)));
    require(a.points >= 1, join(path, "points"), "must be at least 1");
    a.h = number(j, "h", path, a.h);
    require(a.h > 0.0 && a.h < 0.1, join(path, "h"), "must lie in (0, 0.1)");
    return a;
}

OutputConfig parse_output(const json& j) {
    const std::string path = "output";
    check_keys(j, path, {"path", "format"});
    OutputConfig o;
    if (j.contains("path")) {
        require(j.at("path").is_string(), join(path, "path"), "expected a string");
        o.path = j.at("path").get<std::string>();
    }
    if (j.contains("format")) {
        require(j.at("format").is_string(), join(path, "format"), "expected csv or jsonl");
        try {
            o.format = parse_format(j.at("format").get<std::string>());
        } catch (const Error& e) {
            throw ConfigError(join(path, "format"), e.what());
        }
    }
    return o;
}

}  // namespace

Params ParamsConfig::build() const {
    const ConeGeometry geometry = std::holds_alternative<Ratio>(scale)
                                      ? ConeGeometry::from_ratio(std::get<Ratio>(scale).k, std::get<Ratio>(scale).n)
                                      : ConeGeometry::from_scale(std::get<double>(scale));
    return Params(mass, geometry, potential);
}

std::string to_string(OutputFormat f) {
    return f == OutputFormat::csv ? "csv" : "jsonl";
}

OutputFormat parse_format(const std::string& s) {
    if (s == "csv")
        return OutputFormat::csv;
    if (s == "jsonl")
        return OutputFormat::jsonl;
    throw DomainError("unknown output format '" + s + "' (expected csv or jsonl)");
}

RunConfig parse_config(const json& doc) {
    check_keys(doc, "",
               {"params", "initial", "integrator", "quadrature", "scan", "levels", "rationality", "algebra", "seed",
                "output"});
    RunConfig c;
    if (!doc.contains("params"))
        throw ConfigError("params", "required section is missing");
    c.params = parse_params(doc.at("params"));
    if (doc.contains("initial"))
        c.initial = parse_initial(doc.at("initial"));
    if (doc.contains("integrator"))
        c.integrator = parse_integrator(doc.at("integrator"));
    if (doc.contains("quadrature"))
        c.quadrature = parse_quadrature(doc.at("quadrature"));
    if (doc.contains("scan"))
        c.scan = parse_scan(doc.at("scan"));
    if (doc.contains("levels"))
        c.levels = parse_levels(doc.at("levels"));
    if (doc.contains("rationality"))
        c.rationality = parse_rationality(doc.at("rationality"));
    if (doc.contains("algebra"))
        c.algebra = parse_algebra(doc.at("algebra"));
    c.seed = unsigned_integer(doc, "seed", "", 0);
    if (doc.contains("output"))
        c.output = parse_output(doc.at("output"));
    return c;
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json to_json(const RunConfig& c) {
    json params = {{"mass", c.params.mass}, {"potential", potential_to_json(c.params.potential)}};
    if (const auto* r = std::get_if<Ratio>(&c.params.scale))
        params["ratio"] = {r->k, r->n};
    else
        params["s"] = std::get<double>(c.params.scale);

    json doc;
    doc["params"] = params;
    if (c.initial) {
        if (const auto* st = std::get_if<PhaseState>(&*c.initial))
            doc["initial"] = {{"r", st->r}, {"phi", st->phi}, {"p_r", st->p_r}, {"J", st->J}};
        else {
            const auto& lv = std::get<EnergyLevel>(*c.initial);
            doc["initial"] = {{"E", lv.E}, {"J", lv.J}};
        }
    }
    doc["integrator"] = {{"dt", c.integrator.dt},
                         {"n_steps", c.integrator.n_steps},
                         {"sample_every", c.integrator.sample_every},
                         {"detect_closure", c.integrator.detect_closure},
                         {"closure_tol", c.integrator.closure_tol}};
    doc["quadrature"] = {{"tolerance", c.quadrature.tolerance},
                         {"min_order", c.quadrature.min_order},
                         {"max_refinements", c.quadrature.max_refinements}};
    if (c.scan) {
        const auto& s = *c.scan;
        json scan = {{"exponents", s.exponents},
                     {"amplitude", s.amplitude},
                     {"energies",
                      {{"mode", s.energies.mode == EnergyGrid::Mode::relative ? "relative" : "absolute"},
                       {"values", s.energies.values}}},
                     {"lambdas", s.lambdas},
                     {"width_law_levels", s.width_law_levels}};
        if (s.log_potential)
            scan["log_potential"] = {{"B", s.log_B}, {"r0", s.log_r0}};
        doc["scan"] = scan;
    }
    json levels = json::array();
    for (const auto& lv : c.levels)
        levels.push_back({{"E", lv.E}, {"J", lv.J}});
    doc["levels"] = levels;
    doc["rationality"] = {{"q_max", c.rationality.q_max}, {"tolerance", c.rationality.tolerance}};
    doc["algebra"] = {{"points", c.algebra.points}, {"h", c.algebra.h}};
    doc["seed"] = c.seed;
    doc["output"] = {{"path", c.output.path}, {"format", to_string(c.output.format)}};
    return doc;
}

}  // namespace cone::cli
