#include "cone/cli/commands.hpp"
#include "cone/cli/config.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("cone");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CONE_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level != spdlog::level::off || std::string(env) == "off")
            spdlog::set_level(level);
    }
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Central-force motion on a cone: simulation, Bertrand scans, actions and bracket checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_path;
    std::uint64_t seed = 0;
    std::string format;
    for (const char* name : {"simulate", "bertrand", "actions", "verify-algebra"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--output", output_path, "output file (overrides config)");
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_option("--format", format, "csv | jsonl (overrides config)")->check(CLI::IsMember({"csv", "jsonl"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cone::cli::kExitOk : cone::cli::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    const auto* sub = app.get_subcommands().front();

    try {
        auto config = cone::cli::load_config(config_path);
        if (sub->count("--output"))
            config.output.path = output_path;
        if (sub->count("--seed"))
            config.seed = seed;
        if (sub->count("--format"))
            config.output.format = cone::cli::parse_format(format);

        const auto summary = cone::cli::run_command(command, config);
        std::cout << summary.to_json().dump(2) << '\n';
        return summary.exit_status;
    } catch (const cone::cli::ConfigError& e) {
        spdlog::error("config error: {}", e.what());
        std::cout << nlohmann::json{{"command", command}, {"error", e.what()}, {"exit_status", 2}}.dump(2) << '\n';
        return cone::cli::kExitConfig;
    } catch (const cone::TipCollisionError& e) {
        spdlog::error("{} (step {})", e.what(), e.step_index());
        std::cout << nlohmann::json{{"command", command}, {"error", e.what()}, {"step_index", e.step_index()},
                                    {"exit_status", 3}}
                         .dump(2)
                  << '\n';
        return cone::cli::kExitDynamics;
    } catch (const cone::IrrationalScaleError& e) {
        spdlog::error("{}", e.what());
        std::cout << nlohmann::json{{"command", command}, {"error", e.what()}, {"exit_status", 5}}.dump(2) << '\n';
        return cone::cli::kExitIrrationalScale;
    } catch (const cone::Error& e) {
        spdlog::error("{}", e.what());
        std::cout << nlohmann::json{{"command", command}, {"error", e.what()}, {"exit_status", 3}}.dump(2) << '\n';
        return cone::cli::kExitDynamics;
    } catch (const std::exception& e) {
        spdlog::critical("internal error: {}", e.what());
        return cone::cli::kExitInternal;
    }
}
