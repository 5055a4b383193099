#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "chblab/evolution.hpp"
#include "chblab/stationary.hpp"

namespace chb {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key/value view of a TOML document: "section.key" -> raw value text.
/// Supports [section] headers, comments, strings, numbers, booleans and
/// one-line arrays of numbers; anything else is a ConfigError.
using ConfigValue = std::variant<bool, double, std::string, std::vector<double>>;
using ConfigTable = std::map<std::string, ConfigValue>;

ConfigTable parse_toml(const std::string& text, const std::string& origin = "<string>");
ConfigTable load_toml(const std::string& path);
/// Parses "section.key=value" using the same value grammar.
void apply_override(ConfigTable& table, const std::string& assignment);

struct InitialCondition {
    std::string kind = "tanh";  // tanh | uniform | random
    double radius = 4.0;
    double eps = 1.0;
    double value = 0.0;
    double amplitude = 0.2;
};

struct RunConfig {
    std::string command = "simulate";
    std::string out_dir = "out";
    std::uint64_t seed = 12345;

    Grid2D grid = Grid2D{64, 64, 16.0, 16.0};
    PotentialSpec spec = PotentialSpec::obstacle(0.05);
    bool sources = true;
    ExampleParams source;
    double chi = 0.0;
    double K = 1.0;
    double h0 = 1.0;
    FlowMode mode = FlowMode::Brinkman;
    double nu = 1.0;
    double eta0 = 1.0;
    double eta1 = 1.0;
    double lambda0 = 0.0;
    std::string profile = "constant";

    double t_end = 1.0;
    double dt = 0.0;
    InitialCondition initial;
    int snapshot_every = 0;

    double stationary_CF = -1.0;
    double stationary_omega = 0.5;
    double stationary_tol = 1e-8;
    int stationary_max_outer = 400;
    StationaryStrategy stationary_strategy = StationaryStrategy::Picard;
    double pseudotime_horizon = 5.0;

    std::vector<double> deltas{0.1, 0.03, 0.01};
    std::vector<double> darcy_viscosities{1e-1, 1e-2, 1e-3};
    int convergence_levels = 3;
    int check_points = 10000;
    double check_r_max = 5.0;

    ConfigTable echo;  // materialized key/value view, written to the manifest

    SourceModel source_model() const;
    ModelParams model_params() const;
    ScalarField initial_field() const;
};

const std::vector<std::string>& known_commands();

/// Builds a validated RunConfig; every violated assumption is reported by name.
RunConfig build_config(const ConfigTable& table, const std::string& command);
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides,
                       const std::string& command);

std::string format_value(const ConfigValue& v);

}  // namespace chb
