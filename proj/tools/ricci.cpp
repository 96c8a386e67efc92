#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ricci/cli.hpp"

namespace cli = ricci::cli;

int main(int argc, char** argv) {
    CLI::App app{"Prescribed Ricci curvature solver for rotationally symmetric tensors"};
    std::string command;
    std::string config;
    std::string out;
    std::string sweep;
    app.add_option("command", command, "solve | analyze | verify | hypersurface | portrait")->required();
    auto* cfg_opt = app.add_option("--config", config, "config file");
    app.add_option("--out", out, "output prefix (directory with --sweep)");
    auto* sweep_opt = app.add_option("--sweep", sweep, "run every *.cfg in a directory in parallel");
    cfg_opt->excludes(sweep_opt);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << cli::diagnostic_line({cli::ConfigFailure, e.what(), {}}) << '\n';
        return cli::ConfigFailure;
    }
    const auto cmd = cli::parse_command(command);
    if (!cmd) {
        std::cerr << cli::diagnostic_line({cli::ConfigFailure, "unknown command '" + command + "'", {}}) << '\n';
        return cli::ConfigFailure;
    }
    const std::optional<std::string> out_opt = out.empty() ? std::nullopt : std::optional<std::string>(out);

    if (!sweep.empty()) {
        try {
            int worst = cli::Ok;
            for (const auto& e : cli::run_sweep(sweep, *cmd, out_opt)) {
                std::cout << e.config.filename().string() << ": " << cli::diagnostic_line(e.result) << '\n';
                if (e.result.status != cli::Ok)
                    std::cerr << e.config.filename().string() << ": " << cli::diagnostic_line(e.result) << '\n';
                worst = std::max(worst, e.result.status);
            }
            return worst;
        } catch (const cli::ConfigError& e) {
            std::cerr << cli::diagnostic_line({cli::ConfigFailure, e.what(), {}}) << '\n';
            return cli::ConfigFailure;
        }
    }
    if (config.empty()) {
        std::cerr << cli::diagnostic_line({cli::ConfigFailure, "one of --config or --sweep is required", {}}) << '\n';
        return cli::ConfigFailure;
    }
    const auto result = cli::run_file(config, *cmd, out_opt);
    if (result.status != cli::Ok) {
        std::cerr << cli::diagnostic_line(result) << '\n';
    } else {
        for (const auto& f : result.files) std::cout << "wrote " << f << '\n';
    }
    return result.status;
}
