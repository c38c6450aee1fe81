#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "terraspec/cli.hpp"

int main(int argc, char** argv) {
    namespace cli = terraspec::cli;
    CLI::App app{"Spectral numerics for the terraced operator on weighted c0 spaces"};
    app.set_version_flag("--version", std::string(cli::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    unsigned jobs = 1;
    for (const auto& name : cli::commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output file (stdout when omitted)");
        sub->add_option("--jobs", jobs, "worker threads for grids and trials")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    nlohmann::json config;
    try {
        std::ifstream in(config_path);
        config = nlohmann::json::parse(in);
        cli::apply_env_overrides(config);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kUsage;
    }

    const auto result = cli::run(command, config, jobs);
    if (!result.diagnostic.empty()) std::cerr << result.diagnostic << "\n";
    if (result.exit_code == cli::kUsage) return result.exit_code;

    if (out_path.empty()) {
        std::cout << result.output;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        out << result.output;
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return cli::kUsage;
        }
    }
    return result.exit_code;
}
