#include "chblab/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <thread>

namespace chb {

std::string to_string(FlowMode mode) {
    switch (mode) {
        case FlowMode::None: return "none";
        case FlowMode::Brinkman: return "brinkman";
        case FlowMode::Darcy: return "darcy";
    }
    return "unknown";
}

std::vector<std::string> EnergyLedger::columns() {
    return {"step",        "t",           "dt",          "E",          "dissipation",
            "chemotaxis",  "source_work", "lifting_work", "energy_defect", "mass_lhs",
            "mass_rhs",    "mass_defect", "overshoot",   "overshoot_integral", "phi_mean",
            "phi_max_abs", "sigma_min",   "sigma_max",   "newton_iterations", "energy_slack"};
}

void EnergyLedger::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const auto cols = columns();
    for (size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.step << ',' << r.t << ',' << r.dt << ',' << r.energy << ',' << r.dissipation << ','
            << r.chemotaxis << ',' << r.source_work << ',' << r.lifting_work << ',' << r.energy_defect
            << ',' << r.mass_lhs << ',' << r.mass_rhs << ',' << r.mass_defect << ',' << r.overshoot << ','
            << r.overshoot_integral << ',' << r.phi_mean << ',' << r.phi_max_abs << ',' << r.sigma_min
            << ',' << r.sigma_max << ',' << r.newton_iterations << ',' << r.energy_slack << '\n';
    }
}

double discrete_energy(const ScalarField& phi, const PotentialSpec& spec) {
    double bulk = 0.0;
    for (int c = 0; c < phi.grid.cells(); ++c) bulk += psi(spec, phi.values[c]);
    const StaggeredVectorField g = grad(phi);
    return bulk * phi.grid.cell_volume() + 0.5 * face_inner(g, g);
}

double mass_source(const SimState& s, const SourceModel& model) {
    const Grid2D& g = s.phi.grid;
    const ScalarField adv = advect(s.v, s.phi);
    double total = 0.0;
    for (int c = 0; c < g.cells(); ++c) {
        const double r = s.phi.values[c], sg = s.sigma.values[c];
        total += gamma_phi(model, r, sg) - r * gamma_v(model, r, sg) - adv.values[c];
    }
    return total * g.cell_volume() / g.area();
}

MassRate mass_rate(const SimState& prev, const SimState& next, const SourceModel& model) {
    MassRate m;
    const double dt = next.t - prev.t;
    if (!(dt > 0.0)) throw std::invalid_argument("mass_rate needs two consecutive states");
    m.lhs = (next.phi.mean() - prev.phi.mean()) / dt;
    m.rhs = mass_source(next, model);
    m.defect = std::abs(m.lhs - m.rhs);
    return m;
}

double overshoot(const ScalarField& phi) {
    return std::max(0.0, phi.max_abs() - 1.0);
}

double default_dt(const Grid2D& g) {
    const double h = std::min(g.hx(), g.hy());
    return 0.1 * h * h;
}

ScalarField tanh_seed(const Grid2D& g, double radius, double eps) {
    ScalarField phi(g);
    const double cx = 0.5 * g.lx, cy = 0.5 * g.ly;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double d = radius - std::hypot(g.xc(i) - cx, g.yc(j) - cy);
            phi(i, j) = std::tanh(d / (std::sqrt(2.0) * eps));
        }
    return phi;
}

ScalarField clip_interior(const ScalarField& phi, double delta) {
    ScalarField out = phi;
    out.values = phi.values.cwiseMax(-1.0 + delta).cwiseMin(1.0 - delta);
    return out;
}

Simulation::Simulation(const Grid2D& grid, PotentialSpec spec, SourceModel model, ModelParams params,
                       StepSettings settings)
    : grid_(grid),
      spec_(spec),
      model_(std::move(model)),
      params_(std::move(params)),
      settings_(settings),
      L_(neg_laplacian(grid)) {
    grid_.validate();
    spec_.validate();
}

ScalarField Simulation::solve_sigma(const ScalarField& phi) const {
    if (settings_.skip_nutrient) return ScalarField(grid_, 1.0);
    NutrientProblem prob;
    prob.phi = phi;
    prob.h = params_.h;
    prob.K = params_.K;
    return solve_nutrient(prob);
}

SimState Simulation::initial_state(const ScalarField& phi0) const {
    if (!(phi0.grid == grid_)) throw GridMismatch();
    SimState s;
    s.phi = phi0;
    s.sigma = solve_sigma(phi0);
    s.mu = ScalarField(grid_);
    const Vector lphi = L_ * phi0.values;
    for (int c = 0; c < grid_.cells(); ++c)
        s.mu.values[c] = beta(spec_, phi0.values[c]) - spec_.theta_cap * phi0.values[c] + lphi[c] -
                         params_.chi * s.sigma.values[c];
    s.v = StaggeredVectorField(grid_);
    s.p = ScalarField(grid_);
    s.delta = spec_.delta;
    return s;
}

void Simulation::solve_flow(SimState& s, const ScalarField& sigma) {
    if (settings_.freeze_flow || params_.mode == FlowMode::None) {
        s.v = StaggeredVectorField(grid_);
        s.p = ScalarField(grid_);
        return;
    }
    ScalarField gv(grid_);
    for (int c = 0; c < grid_.cells(); ++c) gv.values[c] = gamma_v(model_, s.phi.values[c], sigma.values[c]);
    if (params_.mode == FlowMode::Darcy) {
        DarcyParams dp;
        dp.nu = params_.nu;
        dp.chi = params_.chi;
        FlowSolution sol = solve_darcy(s.mu, sigma, s.phi, gv, dp);
        s.v = std::move(sol.v);
        s.p = std::move(sol.p);
        return;
    }
    BrinkmanProblem prob;
    prob.c = s.phi;
    prob.f = capillary_force(s.mu, sigma, s.phi, params_.chi);
    prob.g = gv;
    prob.nu = params_.nu;
    prob.viscosity = params_.viscosity;
    FlowSolution sol = brinkman_.solve(prob);
    s.v = std::move(sol.v);
    s.p = std::move(sol.p);
}

int Simulation::newton_ch(SimState& s, const ScalarField& sigma, double dt, const Vector& source,
                          double& slack) {
    const int n = grid_.cells();
    const Vector phi_old = s.phi.values;
    const double theta = spec_.theta_cap, chi = params_.chi;
    const Vector lin = theta * phi_old + chi * sigma.values;  // constant part of R2

    Vector phi = phi_old, mu = s.mu.values;
    Vector r1(n), r2(n);
    auto residual = [&](const Vector& ph, const Vector& m) {
        r1 = (ph - phi_old) / dt + L_ * m - source;
        r2 = m - L_ * ph + lin;
        for (int c = 0; c < n; ++c) r2[c] -= beta(spec_, ph[c]);
        return std::max(dt * r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff());
    };
    auto tolerance = [&](const Vector& m) {
        return settings_.newton_tol * std::max(1.0, m.cwiseAbs().maxCoeff());
    };

    auto jacobian = [&](const Vector& ph) {
        Triplets t;
        t.reserve(static_cast<size_t>(12) * n);
        for (int c = 0; c < n; ++c) {
            t.emplace_back(c, c, 1.0 / dt);
            t.emplace_back(n + c, n + c, 1.0);
            t.emplace_back(n + c, c, -beta_prime(spec_, ph[c]));
        }
        for (int k = 0; k < L_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(L_, k); it; ++it) {
                t.emplace_back(it.row(), n + it.col(), it.value());
                t.emplace_back(n + it.row(), it.col(), -it.value());
            }
        SparseMatrix J(2 * n, 2 * n);
        J.setFromTriplets(t.begin(), t.end());
        return J;
    };

    double merit = residual(phi, mu);
    int it = 0;
    while (merit > tolerance(mu)) {
        if (it >= settings_.newton_max)
            throw SolverError("Newton iteration for the Cahn-Hilliard block did not converge", merit, it);
        const SparseMatrix J = jacobian(phi);
        Vector rhs(2 * n);
        rhs << -r1, -r2;
        Vector dx;
        bool solved = false;
        if (lagged_.ready() && lagged_dt_ == dt) {
            try {
                SparseSystem sys{J, rhs, {1e-9, 40, 40}, false};
                dx = solve_general(sys, nullptr, [&](const Vector& y) { return lagged_.solve(y); });
                solved = true;
            } catch (const SolverError&) {
                solved = false;
            }
        }
        if (!solved) {
            lagged_.factorize(J);
            lagged_dt_ = dt;
            ++factorizations_;
            dx = lagged_.solve(rhs);
        }
        double step = 1.0;
        Vector phi_try, mu_try;
        double trial = merit;
        for (int ls = 0; ls < 12; ++ls) {
            phi_try = phi + step * dx.head(n);
            mu_try = mu + step * dx.tail(n);
            trial = residual(phi_try, mu_try);
            if (std::isfinite(trial) && trial <= (1.0 - 1e-4 * step) * merit) break;
            step *= 0.5;
        }
        phi = std::move(phi_try);
        mu = std::move(mu_try);
        merit = residual(phi, mu);
        ++it;
    }
    // bound on the energy change caused by the remaining residual
    const double vol = grid_.cell_volume();
    const Vector w = mu + chi * sigma.values;
    slack = dt * std::abs(r1.dot(w)) * vol + std::abs(r2.dot(phi - phi_old)) * vol;
    s.phi.values = phi;
    s.mu.values = mu;
    return it;
}

LedgerRow Simulation::step(SimState& s, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(s.phi.grid == grid_)) throw GridMismatch();
    const SimState prev = s;
    const double e_old = discrete_energy(prev.phi, spec_);

    const ScalarField sigma = solve_sigma(s.phi);
    solve_flow(s, sigma);

    const double vmax = s.v.max_abs();
    if (vmax > 0.0) {
        const double limit = std::min(grid_.hx(), grid_.hy()) / (2.0 * vmax);
        if (dt > limit) {
            if (!settings_.cap_cfl) throw CflViolation(dt, limit);
            dt = limit;
        }
    }

    const int n = grid_.cells();
    const ScalarField adv = advect(s.v, prev.phi);
    Vector gphi(n), gvv(n), source(n);
    for (int c = 0; c < n; ++c) {
        const double r = prev.phi.values[c], sg = sigma.values[c];
        gphi[c] = gamma_phi(model_, r, sg);
        gvv[c] = gamma_v(model_, r, sg);
        source[c] = gphi[c] - r * gvv[c] - adv.values[c];
    }

    double slack = 0.0;
    const int iters = newton_ch(s, sigma, dt, source, slack);
    s.sigma = sigma;
    s.t += dt;
    s.step_count += 1;
    s.delta = spec_.delta;

    LedgerRow row;
    row.step = s.step_count;
    row.t = s.t;
    row.dt = dt;
    row.energy = discrete_energy(s.phi, spec_);
    row.newton_iterations = iters;
    row.energy_slack = slack;

    const double vol = grid_.cell_volume();
    const StaggeredVectorField gmu = grad(s.mu);
    ViscosityProfile shear_only = params_.viscosity;
    shear_only.lambda = [](double) { return 0.0; };
    const bool brinkman = params_.mode == FlowMode::Brinkman && !settings_.freeze_flow;
    const double visc = brinkman ? viscous_dissipation(s.v, prev.phi, shear_only) : 0.0;
    row.dissipation = face_inner(gmu, gmu) + visc + params_.nu * face_inner(s.v, s.v);
    row.chemotaxis = -params_.chi * face_inner(gmu, grad(sigma));
    const Vector w = s.mu.values + params_.chi * sigma.values;
    for (int c = 0; c < n; ++c) row.source_work += (gphi[c] - prev.phi.values[c] * gvv[c]) * w[c];
    row.source_work *= vol;
    if (model_.active && params_.mode != FlowMode::None && !settings_.freeze_flow) {
        const StaggeredVectorField u = divergence_lift(ScalarField(grid_, gvv)).u;
        double cross = params_.nu * face_inner(s.v, u);
        if (brinkman) {
            StaggeredVectorField sum = s.v, diff = s.v;
            sum.u += u.u;
            sum.v += u.v;
            diff.u -= u.u;
            diff.v -= u.v;
            cross += 0.25 * (viscous_dissipation(sum, prev.phi, shear_only) -
                             viscous_dissipation(diff, prev.phi, shear_only));
        }
        row.lifting_work = cross - face_inner(face_force(ScalarField(grid_, w), prev.phi), u);
    }
    row.energy_defect = (row.energy - e_old) / dt + row.dissipation - row.chemotaxis - row.source_work -
                        row.lifting_work;

    const MassRate m = mass_rate(prev, s, model_);
    row.mass_lhs = m.lhs;
    row.mass_rhs = m.rhs;
    row.mass_defect = m.defect;

    double over2 = 0.0;
    for (int c = 0; c < n; ++c) {
        const double e = std::max(0.0, std::abs(s.phi.values[c]) - 1.0);
        over2 += e * e;
    }
    overshoot_integral_ += dt * over2 * vol;
    row.overshoot = overshoot(s.phi);
    row.overshoot_integral = overshoot_integral_;
    row.phi_mean = s.phi.mean();
    row.phi_max_abs = s.phi.max_abs();
    row.sigma_min = sigma.values.minCoeff();
    row.sigma_max = sigma.values.maxCoeff();
    return row;
}

Trajectory run(Simulation& sim, SimState state, const RunSettings& settings) {
    const double dt = settings.dt > 0.0 ? settings.dt : default_dt(sim.grid());
    Trajectory traj;
    std::vector<std::pair<double, double>> means{{state.t, state.phi.mean()}};
    if (settings.on_snapshot && settings.snapshot_every > 0) settings.on_snapshot(state);
    const double eps = 1e-12 * std::max(1.0, settings.t_end);
    while (state.t < settings.t_end - eps) {
        const double h = std::min(dt, settings.t_end - state.t);
        LedgerRow row = sim.step(state, h);
        traj.ledger.rows.push_back(row);
        means.emplace_back(state.t, row.phi_mean);
        if (settings.on_step) settings.on_step(state, row);
        if (settings.on_snapshot && settings.snapshot_every > 0 && state.step_count % settings.snapshot_every == 0)
            settings.on_snapshot(state);
    }
    double c = 0.0;
    for (size_t a = 0; a < means.size(); ++a)
        for (size_t b = a + 1; b < means.size(); ++b)
            c = std::max(c, std::abs(means[b].second - means[a].second) /
                                std::sqrt(means[b].first - means[a].first));
    traj.holder_constant = c;
    traj.final_state = std::move(state);
    return traj;
}

std::vector<ContinuationRow> delta_continuation(const ContinuationScenario& sc, const std::vector<double>& deltas,
                                                int threads) {
    for (size_t k = 1; k < deltas.size(); ++k)
        if (!(deltas[k] < deltas[k - 1])) throw std::invalid_argument("deltas must be strictly descending");
    std::vector<ContinuationRow> rows(deltas.size());
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (size_t k = next++; k < deltas.size(); k = next++) {
            try {
                PotentialSpec spec = sc.spec;
                spec.delta = deltas[k];
                Simulation sim(sc.grid, spec, sc.model, sc.params, sc.step);
                SimState s0 = sim.initial_state(sc.initial(sc.grid, deltas[k]));
                RunSettings rs;
                rs.t_end = sc.t_end;
                rs.dt = sc.dt;
                Trajectory tr = run(sim, std::move(s0), rs);
                ContinuationRow& row = rows[k];
                row.delta = deltas[k];
                row.steps = static_cast<int>(tr.ledger.rows.size());
                row.min_mean = 1.0;
                row.max_mean = -1.0;
                for (const auto& r : tr.ledger.rows) {
                    row.max_overshoot = std::max(row.max_overshoot, r.overshoot);
                    row.max_abs_phi = std::max(row.max_abs_phi, r.phi_max_abs);
                    row.min_mean = std::min(row.min_mean, r.phi_mean);
                    row.max_mean = std::max(row.max_mean, r.phi_mean);
                    if (!(std::abs(r.phi_mean) < 1.0)) row.means_inside = false;
                }
                row.overshoot_integral = tr.ledger.rows.empty() ? 0.0 : tr.ledger.rows.back().overshoot_integral;
                row.ratio = row.overshoot_integral / deltas[k];
                row.ledger = std::move(tr.ledger);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(deltas.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

}  // namespace chb
