#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "chblab/io.hpp"

namespace fs = std::filesystem;

namespace chb::cli {

namespace {

/// Collects artifacts and property checks for one run, then writes the
/// manifest and summary so that nothing escapes the file list.
class Output {
public:
    Output(const RunConfig& cfg, std::string dir) : cfg_(cfg), dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }

    std::string path(const std::string& name) {
        files_.push_back(name);
        return (fs::path(dir_) / name).string();
    }

    void check(const std::string& name, bool ok, const std::string& detail) {
        checks_.push_back({name, ok, detail});
    }
    void note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

    int finish() {
        bool all = true;
        {
            std::ofstream s(path("summary.txt"));
            s << "command: " << cfg_.command << '\n';
            for (const auto& [k, v] : notes_) s << k << ": " << v << '\n';
            for (const auto& c : checks_) {
                s << (c.ok ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
                all = all && c.ok;
            }
        }
        Manifest m;
        m.command = cfg_.command;
        m.config = cfg_;
        m.files = files_;
        m.files.push_back("manifest.json");
        m.summary = notes_;
        for (const auto& c : checks_) m.summary.emplace_back("check." + c.name, c.ok ? "pass" : "fail");
        write_manifest((fs::path(dir_) / "manifest.json").string(), m);
        return all ? Ok : PropertyViolation;
    }

private:
    struct Check {
        std::string name;
        bool ok;
        std::string detail;
    };
    const RunConfig& cfg_;
    std::string dir_;
    std::vector<std::string> files_;
    std::vector<Check> checks_;
    std::vector<std::pair<std::string, std::string>> notes_;
};

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

void snapshot(Output& out, const SimState& s) {
    std::ostringstream name;
    name << "phi_" << std::setw(6) << std::setfill('0') << s.step_count << ".vtk";
    write_vtk(out.path(name.str()), s.phi.grid, {{"phi", &s.phi}, {"mu", &s.mu}, {"sigma", &s.sigma}, {"p", &s.p}});
}

// Relative float slack for inequalities that hold exactly in real arithmetic.
bool holds(double margin, double scale) { return margin >= -1e-12 * (1.0 + std::abs(scale)); }

int potential_check(const RunConfig& cfg, Output& out) {
    const std::vector<double> deltas{0.2, 0.1, 0.05, 0.01, 0.001};
    const int n = cfg.check_points;
    const double R = cfg.check_r_max;
    auto rgrid = [&](int k) { return -R + 2.0 * R * k / (n - 1); };

    std::vector<std::vector<double>> obs, logs;
    long viol_obs = 0, viol_log = 0;
    for (double d : deltas) {
        if (!(d < 0.25)) continue;
        const PotentialSpec s = PotentialSpec::obstacle(d);
        for (int k = 0; k < n; ++k) {
            const double r = rgrid(k), b = beta(s, r), bh = beta_hat(s, r), bp = beta_prime(s, r);
            const double m_low = 2.0 * bh - d * b * b;
            const double m_up = d * b * b + 1.0 - 2.0 * bh;
            const double m_c = bp - d * bp * bp;
            const double m_sign = r * b - std::abs(b);
            viol_obs += !holds(m_low, bh) + !holds(m_up, bh) + !holds(m_c, bp) + !holds(m_sign, r * b);
            obs.push_back({r, d, b, bh, psi(s, r), m_low, m_up, m_c, m_sign});
        }
    }
    const double theta = cfg.spec.kind == PotentialKind::Logarithmic ? cfg.spec.theta : 1.0;
    const double theta_c = cfg.spec.kind == PotentialKind::Logarithmic ? cfg.spec.theta_c : 1.5;
    const double lim = PotentialSpec::logarithmic(theta, theta_c, 0.01).log_delta_limit();
    double c2 = 0.0;
    for (double d : deltas) {
        const PotentialSpec s = PotentialSpec::logarithmic(theta, theta_c, d);
        for (int k = 0; k < n; ++k) {
            const double r = rgrid(k), b = beta(s, r);
            c2 = std::max(c2, std::abs(b) - theta * std::abs(r) - r * b);
        }
    }
    for (double d : deltas) {
        const PotentialSpec s = PotentialSpec::logarithmic(theta, theta_c, d);
        const bool admissible = d <= lim;
        for (int k = 0; k < n; ++k) {
            const double r = rgrid(k), b = beta(s, r), bh = beta_hat(s, r), bp = beta_prime(s, r);
            const double e = std::max(0.0, std::abs(r) - 1.0);
            const double m_b = admissible ? 4.0 * d / theta * bh - e * e : NAN;
            const double m_d = admissible ? theta * bp - d * bp * bp : NAN;
            const double m_39 = r * b - std::abs(b) + theta * std::abs(r) + c2;
            if (admissible) viol_log += !holds(m_b, bh / d) + !holds(m_d, theta * bp);
            viol_log += !holds(m_39, r * b);
            logs.push_back({r, d, b, bh, psi(s, r), m_b, m_d, m_39});
        }
    }
    write_csv(out.path("potential_obstacle.csv"),
              {"r", "delta", "beta", "beta_hat", "psi", "margin_lower", "margin_upper", "margin_beta_prime",
               "margin_sign"},
              obs);
    write_csv(out.path("potential_log.csv"),
              {"r", "delta", "beta", "beta_hat", "psi", "margin_growth", "margin_beta_prime", "margin_coercive"},
              logs);
    out.note("log_theta", num(theta));
    out.note("log_theta_c", num(theta_c));
    out.note("log_c2", num(c2));
    out.check("obstacle_inequalities", viol_obs == 0, std::to_string(viol_obs) + " violations");
    out.check("log_inequalities", viol_log == 0, std::to_string(viol_log) + " violations");
    return Ok;
}

int simulate(const RunConfig& cfg, Output& out) {
    Simulation sim(cfg.grid, cfg.spec, cfg.source_model(), cfg.model_params());
    SimState s0 = sim.initial_state(cfg.initial_field());
    RunSettings rs;
    rs.t_end = cfg.t_end;
    rs.dt = cfg.dt;
    rs.snapshot_every = cfg.snapshot_every;
    rs.on_snapshot = [&](const SimState& s) { snapshot(out, s); };
    Trajectory tr = run(sim, std::move(s0), rs);
    tr.ledger.write_csv(out.path("ledger.csv"));
    write_vtk(out.path("final.vtk"), cfg.grid,
              {{"phi", &tr.final_state.phi}, {"mu", &tr.final_state.mu}, {"sigma", &tr.final_state.sigma},
               {"p", &tr.final_state.p}});

    out.note("steps", std::to_string(tr.ledger.rows.size()));
    out.note("final_time", num(tr.final_state.t));
    out.note("holder_constant", num(tr.holder_constant));
    bool means = true, sigma_ok = true;
    for (const auto& r : tr.ledger.rows) {
        means = means && std::abs(r.phi_mean) < 1.0;
        sigma_ok = sigma_ok && r.sigma_min >= 0.0 && r.sigma_max <= 1.0;
    }
    out.check("mean_confined", means, "|phi_Omega| < 1 at every step");
    out.check("sigma_bounds", sigma_ok, "0 <= sigma <= 1 at every step");
    const bool gradient_flow = !cfg.sources && cfg.chi == 0.0 && cfg.mode == FlowMode::None;
    if (gradient_flow) {
        double e_prev = discrete_energy(cfg.initial_field(), cfg.spec);
        int bad = 0;
        for (const auto& r : tr.ledger.rows) {
            if (r.energy > e_prev + r.energy_slack) ++bad;
            e_prev = r.energy;
        }
        out.check("energy_nonincreasing", bad == 0, std::to_string(bad) + " increasing steps");
    }
    return Ok;
}

int stationary(const RunConfig& cfg, Output& out) {
    StationaryConfig sc;
    sc.grid = cfg.grid;
    sc.spec = cfg.spec;
    sc.model = cfg.source_model();
    sc.params = cfg.model_params();
    sc.C_F = cfg.stationary_CF;
    sc.omega = cfg.stationary_omega;
    sc.outer_tol = cfg.stationary_tol;
    sc.max_outer = cfg.stationary_max_outer;
    sc.strategy = cfg.stationary_strategy;
    sc.pseudotime_horizon = cfg.pseudotime_horizon;
    sc.initial = cfg.initial_field();
    const StationaryResult res = solve_stationary(sc);
    const auto& st = res.state;
    write_vtk(out.path("stationary.vtk"), cfg.grid,
              {{"phi", &st.phi}, {"mu", &st.mu}, {"sigma", &st.sigma}, {"p", &st.p}});
    std::vector<std::vector<double>> hist;
    for (size_t k = 0; k < res.history.size(); ++k) hist.push_back({double(k + 1), res.history[k]});
    write_csv(out.path("history.csv"), {"iteration", "update"}, hist);

    out.note("outer_iterations", std::to_string(res.outer_iterations));
    out.note("C_F", num(res.C_F));
    out.note("r_phi", num(res.residual.r_phi));
    out.note("r_mu", num(res.residual.r_mu));
    out.note("r_sigma", num(res.residual.r_sigma));
    out.note("r_flow", num(res.residual.r_flow));
    out.note("r_mean", num(res.residual.r_mean));
    if (!res.converged) {
        out.check("converged", false, "outer iteration did not converge");
        out.finish();
        return SolverFailure;
    }
    const double tol = 10.0 * cfg.stationary_tol;
    out.check("converged", res.residual.max() < tol, "max residual " + num(res.residual.max()));
    out.check("mean_identity", res.residual.r_mean <= 1e-6 * cfg.grid.area(), num(res.residual.r_mean));
    out.check("sigma_bounds", st.sigma.values.minCoeff() >= 0.0 && st.sigma.values.maxCoeff() <= 1.0,
              "[" + num(st.sigma.values.minCoeff()) + ", " + num(st.sigma.values.maxCoeff()) + "]");
    out.check("F_inactive", res.F_at_solution == 0.0, "F = " + num(res.F_at_solution));
    out.check("mean_confined", std::abs(st.phi.mean()) < 1.0, "phi_Omega = " + num(st.phi.mean()));
    return Ok;
}

template <class F>
void parallel_for(int n, F&& body) {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex m;
    auto worker = [&]() {
        for (int k = next++; k < n; k = next++) {
            try {
                body(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int t = std::max(1, std::min(worker_threads(), n));
    std::vector<std::thread> pool;
    for (int k = 1; k < t; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

// Insulated top/bottom slab with unit Robin influx at x = 0, L and constant
// consumption; sigma = 1 - K cosh(a(x - L/2)) / (a sinh(aL/2) + K cosh(aL/2)).
double robin_slab_error(int nx, double L, double K, double h0) {
    const Grid2D g = Grid2D::make(nx, 4, L, L * 4.0 / nx);
    NutrientProblem prob;
    prob.phi = ScalarField(g);
    prob.h = [h0](double) { return h0; };
    prob.K = K;
    prob.robin_sides = {true, true, false, false};
    const ScalarField s = solve_nutrient(prob);
    const double a = std::sqrt(h0);
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.xc(i);
            const double exact = K * std::cosh(a * (x - L / 2)) / (a * std::sinh(a * L / 2) + K * std::cosh(a * L / 2));
            err = std::max(err, std::abs(s(i, j) - exact));
        }
    return err;
}

int convergence(const RunConfig& cfg, Output& out) {
    const int levels = cfg.convergence_levels;
    std::vector<double> nerr(levels), derr(levels);
    // slab of fixed length 4 so that nx = 32 already resolves the decay length at h0 = 1
    const double slab = 4.0;
    parallel_for(levels, [&](int k) { nerr[k] = robin_slab_error(32 << k, slab, cfg.K, std::max(cfg.h0, 1e-3)); });

    const double dt0 = cfg.dt > 0.0 ? cfg.dt : default_dt(cfg.grid);
    const double horizon = std::min(cfg.t_end, 4.0 * dt0);
    parallel_for(levels, [&](int k) {
        Simulation sim(cfg.grid, cfg.spec, cfg.source_model(), cfg.model_params());
        RunSettings rs;
        rs.t_end = horizon;
        rs.dt = dt0 / (1 << k);
        const Trajectory tr = run(sim, sim.initial_state(cfg.initial_field()), rs);
        double sum = 0.0;
        for (const auto& r : tr.ledger.rows) sum += r.mass_defect * r.dt;
        derr[k] = sum / horizon;
    });

    std::vector<std::vector<double>> rows;
    bool nutrient_ok = true, mass_ok = true;
    for (int k = 0; k < levels; ++k) {
        const double on = k ? std::log2(nerr[k - 1] / nerr[k]) : NAN;
        const double ratio = k ? derr[k] / derr[k - 1] : NAN;
        rows.push_back({0.0, double(k), slab / (32 << k), nerr[k], on});
        rows.push_back({1.0, double(k), dt0 / (1 << k), derr[k], ratio});
        if (k) {
            nutrient_ok = nutrient_ok && on >= 1.9;
            mass_ok = mass_ok && ratio >= 0.4 && ratio <= 0.6;
        }
    }
    write_csv(out.path("convergence.csv"), {"study", "level", "step", "error", "order_or_ratio"}, rows);
    out.note("study_0", "nutrient Robin slab, max error vs analytic profile");
    out.note("study_1", "mass identity defect, time-averaged over fixed horizon");
    out.check("nutrient_order", nutrient_ok, "observed order >= 1.9");
    out.check("mass_defect_halves", mass_ok, "defect ratio within 0.5 +- 20%");
    return Ok;
}

int darcy_limit(const RunConfig& cfg, Output& out) {
    const SourceModel model = cfg.source_model();
    ModelParams mp = cfg.model_params();
    mp.mode = FlowMode::None;
    Simulation sim(cfg.grid, cfg.spec, model, mp);
    const SimState s = sim.initial_state(cfg.initial_field());
    const int n = cfg.grid.cells();
    ScalarField g(cfg.grid);
    for (int c = 0; c < n; ++c) g.values[c] = gamma_v(model, s.phi.values[c], s.sigma.values[c]);

    DarcyParams dp;
    dp.nu = cfg.nu;
    dp.chi = cfg.chi;
    const FlowSolution darcy = solve_darcy(s.mu, s.sigma, s.phi, g, dp);
    const auto& visc = cfg.darcy_viscosities;
    std::vector<double> diff(visc.size());
    parallel_for(static_cast<int>(visc.size()), [&](int k) {
        BrinkmanProblem bp;
        bp.c = s.phi;
        bp.f = capillary_force(s.mu, s.sigma, s.phi, cfg.chi);
        bp.g = g;
        bp.nu = cfg.nu;
        bp.viscosity = ViscosityProfile::constant_profile(visc[k], visc[k]);
        const FlowSolution b = solve_brinkman(bp);
        StaggeredVectorField d = b.v;
        d.u -= darcy.v.u;
        d.v -= darcy.v.v;
        diff[k] = d.l2_norm();
    });
    std::vector<std::vector<double>> rows;
    bool mono = true;
    for (size_t k = 0; k < visc.size(); ++k) {
        rows.push_back({visc[k], diff[k]});
        if (k) mono = mono && diff[k] < diff[k - 1];
    }
    write_csv(out.path("darcy_limit.csv"), {"viscosity", "l2_difference"}, rows);
    out.note("darcy_velocity_l2", num(darcy.v.l2_norm()));
    out.check("monotone_decrease", mono, "||v_brinkman - v_darcy|| decreasing in viscosity");
    return Ok;
}

int delta_continuation(const RunConfig& cfg, Output& out) {
    ContinuationScenario sc;
    sc.grid = cfg.grid;
    sc.spec = cfg.spec;
    sc.model = cfg.source_model();
    sc.params = cfg.model_params();
    const RunConfig* c = &cfg;
    sc.initial = [c](const Grid2D&, double delta) {
        ScalarField phi = c->initial_field();
        return c->spec.kind == PotentialKind::Logarithmic ? clip_interior(phi, delta) : phi;
    };
    sc.t_end = cfg.t_end;
    sc.dt = cfg.dt;
    const auto rows = chb::delta_continuation(sc, cfg.deltas, worker_threads());

    std::vector<std::vector<double>> table;
    bool decreasing = true, means = true, interior = true;
    double rmin = INFINITY, rmax = 0.0;
    for (size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        table.push_back({r.delta, r.overshoot_integral, r.ratio, r.max_overshoot, r.max_abs_phi, r.min_mean,
                         r.max_mean, double(r.steps)});
        r.ledger.write_csv(out.path("ledger_delta_" + std::to_string(k) + ".csv"));
        if (k) decreasing = decreasing && r.overshoot_integral < rows[k - 1].overshoot_integral;
        means = means && r.means_inside;
        interior = interior && r.max_abs_phi < 1.0;
        rmin = std::min(rmin, r.ratio);
        rmax = std::max(rmax, r.ratio);
    }
    write_csv(out.path("continuation.csv"),
              {"delta", "overshoot_integral", "ratio", "max_overshoot", "max_abs_phi", "min_mean", "max_mean", "steps"},
              table);
    out.check("mean_confined", means, "|phi_Omega| < 1 at every recorded step");
    if (cfg.spec.kind == PotentialKind::DoubleObstacle) {
        out.check("overshoot_decreasing", decreasing, "overshoot strictly decreasing in delta");
        out.check("ratio_bounded", rmin > 0.0 && rmax <= 10.0 * rmin,
                  "O/delta spans [" + num(rmin) + ", " + num(rmax) + "], allowed spread 10");
    } else {
        out.check("strict_interior", interior, "max|phi| < 1 at every cell");
    }
    return Ok;
}

}  // namespace

int worker_threads() {
    int t = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CHB_LAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) t = t > 0 ? std::min(t, v) : v;
    }
    return std::max(1, t);
}

int dispatch(const RunConfig& cfg, const std::string& out_dir) {
    Output out(cfg, out_dir);
    int code = Ok;
    if (cfg.command == "potential-check") code = potential_check(cfg, out);
    else if (cfg.command == "simulate") code = simulate(cfg, out);
    else if (cfg.command == "stationary") code = stationary(cfg, out);
    else if (cfg.command == "convergence") code = convergence(cfg, out);
    else if (cfg.command == "darcy-limit") code = darcy_limit(cfg, out);
    else if (cfg.command == "delta-continuation") code = delta_continuation(cfg, out);
    if (code != Ok) return code;
    return out.finish();
}

}  // namespace chb::cli
