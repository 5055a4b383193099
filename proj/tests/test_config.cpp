#include <cmath>

#include "chblab/config.hpp"
#include "doctest.h"

using namespace chb;

namespace {

RunConfig build(const std::string& toml, const std::string& command = "simulate") {
    return build_config(parse_toml(toml), command);
}

}  // namespace

TEST_CASE("toml subset parser") {
    const ConfigTable t = parse_toml(R"(
# comment
top = 3
[grid]
nx = 32        # trailing comment
lx = 1_000.5
[potential]
kind = "log"
[source]
enabled = false
[continuation]
deltas = [0.1, 0.05, 1e-3]
)");
    CHECK(std::get<double>(t.at("top")) == 3.0);
    CHECK(std::get<double>(t.at("grid.nx")) == 32.0);
    CHECK(std::get<double>(t.at("grid.lx")) == 1000.5);
    CHECK(std::get<std::string>(t.at("potential.kind")) == "log");
    CHECK(std::get<bool>(t.at("source.enabled")) == false);
    const auto& d = std::get<std::vector<double>>(t.at("continuation.deltas"));
    REQUIRE(d.size() == 3);
    CHECK(d[2] == 1e-3);

    CHECK_THROWS_AS(parse_toml("[grid]\nnx = 1\nnx = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("[grid\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("key\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("k = bare\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("k = [1, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("k = \"open\n"), ConfigError);
    CHECK_THROWS_AS(load_toml("/nonexistent/config.toml"), ConfigError);
}

TEST_CASE("overrides") {
    ConfigTable t = parse_toml("[grid]\nnx = 32\n");
    apply_override(t, "grid.nx=16");
    apply_override(t, "flow.mode=darcy");
    apply_override(t, "potential.kind = \"log\"");
    CHECK(std::get<double>(t.at("grid.nx")) == 16.0);
    CHECK(std::get<std::string>(t.at("flow.mode")) == "darcy");
    CHECK(std::get<std::string>(t.at("potential.kind")) == "log");
    CHECK_THROWS_AS(apply_override(t, "grid.nx"), ConfigError);
    CHECK_THROWS_AS(apply_override(t, "=3"), ConfigError);
}

TEST_CASE("defaults are materialized") {
    const RunConfig c = build("");
    CHECK(c.grid.nx == 64);
    CHECK(c.grid.ny == 64);
    CHECK(c.grid.lx == 16.0);
    CHECK(c.spec.kind == PotentialKind::DoubleObstacle);
    CHECK(c.mode == FlowMode::Brinkman);
    CHECK(c.sources);
    CHECK(c.initial.radius == doctest::Approx(4.0));
    CHECK(c.echo.count("grid.nx") == 1);
    CHECK(c.echo.count("potential.delta") == 1);
    CHECK(c.echo.count("flow.nu") == 1);
    CHECK(format_value(c.echo.at("grid.nx")) == "64");
}

TEST_CASE("assumption violations are named") {
    CHECK_THROWS_WITH_AS(build("[source]\nrho_S = 0.5\nalpha = 1.0\n"), doctest::Contains("(B1)"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[source]\nalpha = -0.5\n"), doctest::Contains("(A4)"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[potential]\nkind = \"log\"\ntheta = 1.0\ntheta_c = 1.5\ndelta = 0.3\n"),
                         doctest::Contains("Prop. 3.4"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[potential]\nkind = \"log\"\ntheta = 2.0\ntheta_c = 1.5\n"),
                         doctest::Contains("theta_c"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[nutrient]\nh0 = -1\n"), doctest::Contains("(A3)"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[flow]\neta0 = 0\n"), doctest::Contains("(A3)"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[init]\nkind = \"uniform\"\nvalue = 1.5\n"), doctest::Contains("(B2)"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(build("[nutrient]\nK = 0\n"), doctest::Contains("nutrient.K"), ConfigError);
    // without sources (B1) does not apply
    CHECK_NOTHROW(build("[source]\nenabled = false\nrho_S = 0.5\n"));
}

TEST_CASE("unknown keys, commands and types") {
    CHECK_THROWS_WITH_AS(build("[grid]\nnz = 3\n"), doctest::Contains("grid.nz"), ConfigError);
    CHECK_THROWS_WITH_AS(build("", "explode"), doctest::Contains("unknown command"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[grid]\nnx = 12.5\n"), doctest::Contains("integer"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[grid]\nnx = \"big\"\n"), doctest::Contains("number"), ConfigError);
    CHECK_THROWS_AS(build("[flow]\nmode = \"stokes\"\n"), ConfigError);
    CHECK(known_commands().size() == 6);
}

TEST_CASE("command specific checks") {
    CHECK_THROWS_WITH_AS(build("[continuation]\ndeltas = [0.01, 0.1]\n", "delta-continuation"),
                         doctest::Contains("descending"), ConfigError);
    CHECK_NOTHROW(build("[continuation]\ndeltas = [0.01, 0.1]\n", "simulate"));
    CHECK_THROWS_AS(build("[darcy]\nviscosities = [0.01, 0.1]\n", "darcy-limit"), ConfigError);
    CHECK_THROWS_WITH_AS(build("[potential]\nkind = \"log\"\ndelta = 0.1\n[continuation]\ndeltas = [0.2, 0.1]\n",
                               "delta-continuation"),
                         doctest::Contains("admissible"), ConfigError);
}

TEST_CASE("derived objects") {
    const RunConfig c = build("[grid]\nnx = 16\nlx = 4\n[potential]\nkind = \"log\"\ndelta = 0.05\n"
                              "[init]\nkind = \"random\"\nvalue = 0.0\namplitude = 1.0\n"
                              "[flow]\nprofile = \"linear-in-phi\"\neta0 = 0.5\neta1 = 2\n");
    const ScalarField phi = c.initial_field();
    CHECK(phi.values.maxCoeff() <= 1.0 - 0.05);
    CHECK(phi.values.minCoeff() >= -1.0 + 0.05);
    CHECK((phi.values - c.initial_field().values).norm() == 0.0);
    const ModelParams p = c.model_params();
    CHECK(p.viscosity.eta(1.0) == doctest::Approx(2.0));
    CHECK(c.source_model().kind == PotentialKind::Logarithmic);
    CHECK_FALSE(build("[source]\nenabled = false\n").source_model().active);
}
