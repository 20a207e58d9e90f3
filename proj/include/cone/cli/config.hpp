#pragma once

#include "cone/actions.hpp"
#include "cone/bertrand.hpp"
#include "cone/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cone::cli {

/// Invalid configuration; `path()` names the offending field, e.g. "initial.r".
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct ParamsConfig {
    double mass = 1.0;
    /// plain scale factor, or the exact ratio k/n
    std::variant<double, Ratio> scale = 1.0;
    Potential potential = Kepler(1.0);

    Params build() const;
    friend bool operator==(const ParamsConfig&, const ParamsConfig&) = default;
};

struct PhaseState {
    double r = 1.0;
    double phi = 0.0;
    double p_r = 0.0;
    double J = 1.0;
    friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

struct EnergyLevel {
    double E = 0.0;
    double J = 1.0;
    friend bool operator==(const EnergyLevel&, const EnergyLevel&) = default;
};

struct IntegratorConfig {
    double dt = 1e-3;
    std::size_t n_steps = 1000;
    std::size_t sample_every = 1;
    bool detect_closure = false;
    double closure_tol = 1e-6;
    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

struct ScanConfig {
    std::vector<double> exponents;
    double amplitude = 1.0;
    EnergyGrid energies;
    std::vector<double> lambdas;
    bool log_potential = false;
    double log_B = 1.0;
    double log_r0 = 1.0;
    int width_law_levels = 50;
    friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

struct AlgebraConfig {
    int points = 100;
    double h = 1e-5;
    friend bool operator==(const AlgebraConfig&, const AlgebraConfig&) = default;
};

enum class OutputFormat { csv, jsonl };

struct OutputConfig {
    std::string path;
    OutputFormat format = OutputFormat::csv;
    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

/// One experiment. Sections irrelevant to a subcommand may be absent.
struct RunConfig {
    ParamsConfig params;
    std::optional<std::variant<PhaseState, EnergyLevel>> initial;
    IntegratorConfig integrator;
    numerics::QuadratureOptions quadrature;
    std::optional<ScanConfig> scan;
    std::vector<EnergyLevel> levels;
    RationalityOptions rationality;
    AlgebraConfig algebra;
    std::uint64_t seed = 0;
    OutputConfig output;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parse and validate; unknown keys and out-of-range values raise ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON form; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& s);

}  // namespace cone::cli
