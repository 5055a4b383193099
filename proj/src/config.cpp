#include "chblab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace chb {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    char quote = 0;
    for (size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return line.substr(0, k);
        }
    }
    return line;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::string t;
    for (char c : s)
        if (c != '_') t += c;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end && *end == '\0' && end != t.c_str();
}

ConfigValue parse_value(const std::string& raw, const std::string& where, bool allow_bare) {
    const std::string v = trim(raw);
    if (v.empty()) throw ConfigError(where + ": missing value");
    if ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')) {
        if (v.size() < 2) throw ConfigError(where + ": unterminated string");
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError(where + ": arrays must close on the same line");
        std::vector<double> arr;
        std::stringstream ss(v.substr(1, v.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            double x;
            if (!parse_number(item, x)) throw ConfigError(where + ": arrays may only hold numbers");
            arr.push_back(x);
        }
        return arr;
    }
    double x;
    if (parse_number(v, x)) return x;
    if (allow_bare) return v;
    throw ConfigError(where + ": cannot parse value '" + v + "' (strings need quotes)");
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "grid.nx", "grid.ny", "grid.lx", "grid.ly",
        "potential.kind", "potential.delta", "potential.theta", "potential.theta_c",
        "source.enabled", "source.P", "source.A", "source.alpha", "source.rho_S", "source.r0",
        "nutrient.K", "nutrient.h0", "nutrient.chi",
        "mode", "flow.mode", "flow.nu", "flow.eta0", "flow.eta1", "flow.lambda0", "flow.profile",
        "time.t_end", "time.dt",
        "init.kind", "init.radius", "init.eps", "init.value", "init.amplitude",
        "output.snapshot_every", "output.seed",
        "stationary.CF", "stationary.omega", "stationary.tol", "stationary.max_outer",
        "stationary.strategy", "stationary.horizon",
        "continuation.deltas", "darcy.viscosities", "convergence.levels",
        "check.points", "check.r_max"};
    return keys;
}

class Reader {
public:
    explicit Reader(const ConfigTable& t) : t_(t) {
        for (const auto& [k, v] : t)
            if (!known_keys().count(k)) throw ConfigError("unknown configuration key '" + k + "'");
    }

    double num(const std::string& key, double def) {
        auto it = t_.find(key);
        if (it == t_.end()) return record(key, def);
        if (auto p = std::get_if<double>(&it->second)) return record(key, *p);
        throw ConfigError(key + " must be a number");
    }
    int integer(const std::string& key, int def) {
        const double x = num(key, def);
        if (x != std::floor(x)) throw ConfigError(key + " must be an integer");
        return static_cast<int>(x);
    }
    bool flag(const std::string& key, bool def) {
        auto it = t_.find(key);
        if (it == t_.end()) return record(key, def);
        if (auto p = std::get_if<bool>(&it->second)) return record(key, *p);
        throw ConfigError(key + " must be true or false");
    }
    std::string str(const std::string& key, const std::string& def) {
        auto it = t_.find(key);
        if (it == t_.end()) return record(key, def);
        if (auto p = std::get_if<std::string>(&it->second)) return record(key, *p);
        throw ConfigError(key + " must be a string");
    }
    std::vector<double> list(const std::string& key, const std::vector<double>& def) {
        auto it = t_.find(key);
        if (it == t_.end()) return record(key, def);
        if (auto p = std::get_if<std::vector<double>>(&it->second)) return record(key, *p);
        if (auto p = std::get_if<double>(&it->second)) return record(key, std::vector<double>{*p});
        throw ConfigError(key + " must be an array of numbers");
    }
    bool has(const std::string& key) const { return t_.count(key) > 0; }

    ConfigTable echo;

private:
    template <class T>
    T record(const std::string& key, T v) {
        echo[key] = v;
        return v;
    }
    const ConfigTable& t_;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

ConfigTable parse_toml(const std::string& text, const std::string& origin) {
    ConfigTable table;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        const std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) throw ConfigError(where + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.count(full)) throw ConfigError(where + ": duplicate key '" + full + "'");
        table[full] = parse_value(s.substr(eq + 1), where, false);
    }
    return table;
}

ConfigTable load_toml(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read configuration file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_toml(ss.str(), path);
}

void apply_override(ConfigTable& table, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("--set with empty key");
    table[key] = parse_value(assignment.substr(eq + 1), "--set " + key, true);
}

std::string format_value(const ConfigValue& v) {
    if (auto b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (auto d = std::get_if<double>(&v)) return fmt(*d);
    if (auto s = std::get_if<std::string>(&v)) return *s;
    const auto& arr = std::get<std::vector<double>>(v);
    std::string out = "[";
    for (size_t k = 0; k < arr.size(); ++k) out += (k ? ", " : "") + fmt(arr[k]);
    return out + "]";
}

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> cmds = {"simulate",    "stationary",  "potential-check",
                                                  "convergence", "darcy-limit", "delta-continuation"};
    return cmds;
}

RunConfig build_config(const ConfigTable& table, const std::string& command) {
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
        throw ConfigError("unknown command '" + command + "'");
    Reader rd(table);
    RunConfig c;
    c.command = command;

    c.grid.nx = rd.integer("grid.nx", 64);
    c.grid.ny = rd.integer("grid.ny", c.grid.nx);
    c.grid.lx = rd.num("grid.lx", 16.0);
    c.grid.ly = rd.num("grid.ly", c.grid.lx);
    require(c.grid.nx >= 4 && c.grid.ny >= 4, "grid.nx and grid.ny must be at least 4");
    require(c.grid.lx > 0.0 && c.grid.ly > 0.0, "grid.lx and grid.ly must be positive");

    const std::string kind = rd.str("potential.kind", "obstacle");
    const double delta = rd.num("potential.delta", 0.05);
    require(delta > 0.0 && delta < 1.0, "potential.delta must lie in (0,1)");
    if (kind == "obstacle" || kind == "double-obstacle") {
        c.spec = PotentialSpec::obstacle(delta);
    } else if (kind == "log" || kind == "logarithmic") {
        const double theta = rd.num("potential.theta", 1.0);
        const double theta_c = rd.num("potential.theta_c", 1.5);
        require(theta > 0.0 && theta < theta_c,
                "potential.theta/theta_c violate the logarithmic potential assumption 0 < theta < theta_c");
        c.spec = PotentialSpec::logarithmic(theta, theta_c, delta);
        const double lim = c.spec.log_delta_limit();
        require(delta <= lim, "potential.delta = " + fmt(delta) +
                                  " violates the Prop. 3.4 hypothesis delta <= min(1, theta/(4 theta_c)) = " +
                                  fmt(lim));
    } else {
        throw ConfigError("potential.kind must be 'obstacle' or 'log', got '" + kind + "'");
    }

    c.sources = rd.flag("source.enabled", true);
    c.source.P = rd.num("source.P", 1.0);
    c.source.A = rd.num("source.A", 0.5);
    c.source.alpha = rd.num("source.alpha", 1.0);
    c.source.rho_S = rd.num("source.rho_S", 2.0);
    c.source.r0 = rd.num("source.r0", 1.5);
    if (c.sources) {
        require(c.source.P > 0.0 && c.source.A > 0.0, "source.P and source.A must be positive");
        require(c.source.rho_S > std::abs(c.source.alpha),
                "source.rho_S = " + fmt(c.source.rho_S) + " with source.alpha = " + fmt(c.source.alpha) +
                    " violates the (B1) sign condition f_phi(1) - f_v(1) < 0 (needs rho_S > |alpha|)");
        require(c.source.alpha >= 0.0, "source.alpha < 0 violates (A4): b_v = alpha P (1-r^2)_+ must be nonnegative");
        if (c.spec.kind == PotentialKind::Logarithmic) {
            require(c.source.r0 > 1.0, "source.r0 must exceed 1 for the log-case source extension");
            const double d0 = source_delta0(c.source_model());
            require(delta < d0, "potential.delta = " + fmt(delta) + " violates the Lemma 3.5 hypothesis delta < delta0 = " +
                                    fmt(d0));
        }
    }

    c.K = rd.num("nutrient.K", 1.0);
    c.h0 = rd.num("nutrient.h0", 1.0);
    c.chi = rd.num("nutrient.chi", 0.0);
    require(c.K > 0.0, "nutrient.K must be positive (Robin permeability in d_n sigma = K(1 - sigma))");
    require(c.h0 >= 0.0, "nutrient.h0 < 0 violates (A3): the consumption h must be nonnegative");
    require(c.chi >= 0.0, "nutrient.chi must be nonnegative");

    std::string mode = rd.str("flow.mode", "brinkman");
    if (rd.has("mode")) mode = rd.str("mode", mode);
    if (mode == "brinkman") c.mode = FlowMode::Brinkman;
    else if (mode == "darcy") c.mode = FlowMode::Darcy;
    else if (mode == "none") c.mode = FlowMode::None;
    else throw ConfigError("flow.mode must be 'brinkman', 'darcy' or 'none', got '" + mode + "'");
    c.nu = rd.num("flow.nu", 1.0);
    c.eta0 = rd.num("flow.eta0", 1.0);
    c.eta1 = rd.num("flow.eta1", c.eta0);
    c.lambda0 = rd.num("flow.lambda0", 0.0);
    c.profile = rd.str("flow.profile", "constant");
    require(c.nu > 0.0, "flow.nu must be positive (friction in the Brinkman law)");
    require(c.eta0 > 0.0 && c.eta1 > 0.0, "flow.eta0/eta1 violate (A3): eta0 <= eta <= eta1 with eta0 > 0");
    require(c.lambda0 >= 0.0, "flow.lambda0 violates (A3): 0 <= lambda <= lambda0");
    require(c.profile == "constant" || c.profile == "linear-in-phi",
            "flow.profile must be 'constant' or 'linear-in-phi'");
    {
        const std::string msg = c.model_params().viscosity.check_bounds();
        require(msg.empty(), "flow viscosity profile: " + msg);
    }

    c.t_end = rd.num("time.t_end", 1.0);
    c.dt = rd.num("time.dt", 0.0);
    require(c.t_end > 0.0, "time.t_end must be positive");
    require(c.dt >= 0.0, "time.dt must be nonnegative (0 selects 0.1 min(hx,hy)^2)");

    c.initial.kind = rd.str("init.kind", "tanh");
    c.initial.radius = rd.num("init.radius", 0.25 * std::min(c.grid.lx, c.grid.ly));
    c.initial.eps = rd.num("init.eps", 1.0);
    c.initial.value = rd.num("init.value", 0.0);
    c.initial.amplitude = rd.num("init.amplitude", 0.2);
    require(c.initial.kind == "tanh" || c.initial.kind == "uniform" || c.initial.kind == "random",
            "init.kind must be 'tanh', 'uniform' or 'random'");
    require(c.initial.eps > 0.0, "init.eps must be positive");
    if (c.initial.kind == "uniform")
        require(std::abs(c.initial.value) <= 1.0 && (c.spec.kind == PotentialKind::DoubleObstacle ||
                                                     std::abs(c.initial.value) < 1.0),
                "init.value violates (B2)/(C3): the initial phase field must satisfy |phi0| <= 1 (|phi0| < 1 for log)");
    if (c.initial.kind == "random")
        require(c.initial.amplitude >= 0.0 && std::abs(c.initial.value) + c.initial.amplitude <= 1.0,
                "init.value + init.amplitude violates (B2): |phi0| <= 1");

    c.snapshot_every = rd.integer("output.snapshot_every", 0);
    require(c.snapshot_every >= 0, "output.snapshot_every must be nonnegative");
    c.seed = static_cast<std::uint64_t>(rd.num("output.seed", 12345));

    c.stationary_CF = rd.num("stationary.CF", -1.0);
    c.stationary_omega = rd.num("stationary.omega", 0.5);
    c.stationary_tol = rd.num("stationary.tol", 1e-8);
    c.stationary_max_outer = rd.integer("stationary.max_outer", 400);
    c.pseudotime_horizon = rd.num("stationary.horizon", 5.0);
    const std::string strat = rd.str("stationary.strategy", "picard");
    require(strat == "picard" || strat == "pseudotime", "stationary.strategy must be 'picard' or 'pseudotime'");
    c.stationary_strategy = strat == "picard" ? StationaryStrategy::Picard : StationaryStrategy::Pseudotime;
    require(c.stationary_omega > 0.0 && c.stationary_omega <= 1.0, "stationary.omega must lie in (0,1]");
    require(c.stationary_tol > 0.0, "stationary.tol must be positive");
    require(c.stationary_CF == -1.0 || c.stationary_CF >= 0.0, "stationary.CF must be nonnegative");

    c.deltas = rd.list("continuation.deltas", {0.1, 0.03, 0.01});
    c.darcy_viscosities = rd.list("darcy.viscosities", {1e-1, 1e-2, 1e-3});
    c.convergence_levels = rd.integer("convergence.levels", 3);
    c.check_points = rd.integer("check.points", 10000);
    c.check_r_max = rd.num("check.r_max", 5.0);
    require(c.convergence_levels >= 2, "convergence.levels must be at least 2");
    require(c.check_points >= 10, "check.points must be at least 10");

    if (command == "delta-continuation") {
        require(!c.deltas.empty(), "continuation.deltas must not be empty");
        for (size_t k = 0; k < c.deltas.size(); ++k) {
            require(c.deltas[k] > 0.0 && c.deltas[k] < 1.0, "continuation.deltas must lie in (0,1)");
            if (k) require(c.deltas[k] < c.deltas[k - 1], "continuation.deltas must be strictly descending");
        }
        if (c.spec.kind == PotentialKind::Logarithmic) {
            double dstar = c.spec.log_delta_limit();
            if (c.sources) dstar = std::min(dstar, source_delta0(c.source_model()));
            require(c.deltas.front() <= dstar, "continuation.deltas exceed the admissible range delta < min(1, theta/(4 theta_c), delta0) = " +
                                                   fmt(dstar));
        }
    }
    if (command == "darcy-limit") {
        for (size_t k = 1; k < c.darcy_viscosities.size(); ++k)
            require(c.darcy_viscosities[k] < c.darcy_viscosities[k - 1], "darcy.viscosities must be strictly descending");
    }

    c.echo = std::move(rd.echo);
    return c;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides,
                       const std::string& command) {
    ConfigTable t = path.empty() ? ConfigTable{} : load_toml(path);
    for (const auto& o : overrides) apply_override(t, o);
    return build_config(t, command);
}

SourceModel RunConfig::source_model() const {
    if (!sources) return SourceModel::none();
    return build_example_model(source.P, source.A, source.alpha, source.rho_S, spec.kind, source.r0);
}

ModelParams RunConfig::model_params() const {
    ModelParams p;
    p.chi = chi;
    p.K = K;
    p.h = default_consumption(h0);
    p.nu = nu;
    p.viscosity = profile == "constant" ? ViscosityProfile::constant_profile(eta0, lambda0)
                                        : ViscosityProfile::linear_in_phi(eta0, eta1, lambda0);
    p.mode = mode;
    return p;
}

ScalarField RunConfig::initial_field() const {
    ScalarField phi(grid);
    if (initial.kind == "tanh") {
        phi = tanh_seed(grid, initial.radius, initial.eps);
    } else if (initial.kind == "uniform") {
        phi.values.setConstant(initial.value);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int k = 0; k < grid.cells(); ++k) phi.values[k] = initial.value + initial.amplitude * u(rng);
    }
    if (spec.kind == PotentialKind::Logarithmic) phi = clip_interior(phi, spec.delta);
    return phi;
}

}  // namespace chb
