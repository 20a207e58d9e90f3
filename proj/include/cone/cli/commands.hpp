#pragma once

#include "cone/cli/config.hpp"

#include <json.hpp>

#include <string>

namespace cone::cli {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitDynamics = 3,
    kExitScanInfeasible = 4,
    kExitIrrationalScale = 5,
};

struct RunSummary {
    std::string command;
    double wall_time_s = 0.0;
    nlohmann::json results = nlohmann::json::object();
    int exit_status = kExitOk;
    std::uint64_t seed = 0;
    std::string output_path;

    nlohmann::json to_json() const;
};

RunSummary cmd_simulate(const RunConfig& config);
RunSummary cmd_bertrand(const RunConfig& config);
RunSummary cmd_actions(const RunConfig& config);
RunSummary cmd_verify_algebra(const RunConfig& config);

/// Dispatch by subcommand name (simulate | bertrand | actions | verify-algebra).
RunSummary run_command(const std::string& name, const RunConfig& config);

/// Output path used when the config leaves it empty: "cone_<command>.<ext>".
std::string default_output_path(const std::string& command, OutputFormat format);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

}  // namespace cone::cli
