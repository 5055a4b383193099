#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chblab/config.hpp"
#include "chblab/linalg.hpp"
#include "commands.hpp"

namespace {

std::string usage() {
    std::string s = "usage: chb-lab <command> [--config file.toml] [--set key=value]... [--out dir]\ncommands:";
    for (const auto& c : chb::known_commands()) s += " " + c;
    return s + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cahn-Hilliard-Brinkman tumour model laboratory"};
    std::string command, config_path, out_dir = "out";
    std::vector<std::string> overrides;
    app.add_option("command", command, "experiment family")->required();
    app.add_option("--config,-c", config_path, "TOML configuration file");
    app.add_option("--set,-s", overrides, "override a configuration key (section.key=value)");
    app.add_option("--out,-o", out_dir, "output directory");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help() << usage();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << usage();
        return chb::cli::ConfigFailure;
    }

    chb::RunConfig cfg;
    try {
        cfg = chb::parse_config(config_path, overrides, command);
        cfg.out_dir = out_dir;
    } catch (const chb::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        if (e.what() == "unknown command '" + command + "'") std::cerr << usage();
        return chb::cli::ConfigFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return chb::cli::ConfigFailure;
    }

    try {
        const int code = chb::cli::dispatch(cfg, out_dir);
        if (code == chb::cli::PropertyViolation) std::cerr << "property check failed; see " << out_dir << "/summary.txt\n";
        return code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return chb::cli::ConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return chb::cli::SolverFailure;
    }
}
