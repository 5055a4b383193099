#include "chblab/stationary.hpp"

#include <algorithm>
#include <cmath>

namespace chb {

namespace {

double ramp_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// (H^1)^* norm of a cell residual: sqrt(e^T (I + L)^{-1} e vol).
double dual_norm(const Vector& e, const SparseMatrix& L, const Grid2D& g) {
    if (e.squaredNorm() == 0.0) return 0.0;
    SparseSystem sys{identity_matrix(g.cells()) + L, e, {1e-12, 0, 60}, false};
    const Vector z = solve_spd(sys);
    return std::sqrt(std::max(0.0, e.dot(z)) * g.cell_volume());
}

ScalarField cutoff_field(const ScalarField& phi, double delta) {
    ScalarField t(phi.grid);
    for (int c = 0; c < phi.grid.cells(); ++c) t.values[c] = cutoff(delta, phi.values[c]);
    return t;
}

// psi'(phi) - lap(phi), the chemical potential without the chemotaxis shift.
ScalarField driving_potential(const ScalarField& phi, const PotentialSpec& spec, const SparseMatrix& L) {
    ScalarField m(phi.grid);
    m.values = L * phi.values;
    for (int c = 0; c < phi.grid.cells(); ++c) m.values[c] += psi_prime(spec, phi.values[c]);
    return m;
}

ScalarField gamma_v_field(const SourceModel& model, const ScalarField& phi, const ScalarField& sigma) {
    ScalarField gv(phi.grid);
    for (int c = 0; c < phi.grid.cells(); ++c) gv.values[c] = gamma_v(model, phi.values[c], sigma.values[c]);
    return gv;
}

BrinkmanProblem frozen_brinkman(const StationaryConfig& cfg, const ScalarField& phi, const ScalarField& sigma,
                                const SparseMatrix& L) {
    BrinkmanProblem prob;
    prob.c = phi;
    prob.f = face_force(driving_potential(phi, cfg.spec, L), cutoff_field(phi, cfg.spec.delta));
    prob.g = gamma_v_field(cfg.model, phi, sigma);
    prob.nu = cfg.params.nu;
    prob.viscosity = cfg.params.viscosity;
    return prob;
}

ScalarField frozen_sigma(const StationaryConfig& cfg, const ScalarField& phi) {
    NutrientProblem np;
    np.phi = phi;
    np.h = cfg.params.h;
    np.K = cfg.params.K;
    return solve_nutrient(np);
}

void frozen_flow(const StationaryConfig& cfg, const ScalarField& phi, const ScalarField& sigma,
                 const SparseMatrix& L, BrinkmanSolver& brinkman, StaggeredVectorField& v, ScalarField& p) {
    const Grid2D& g = phi.grid;
    if (cfg.params.mode == FlowMode::None) {
        v = StaggeredVectorField(g);
        p = ScalarField(g);
        return;
    }
    if (cfg.params.mode == FlowMode::Darcy) {
        ScalarField m = driving_potential(phi, cfg.spec, L);
        m.values -= cfg.params.chi * sigma.values;
        DarcyParams dp{cfg.params.nu, cfg.params.chi, {}};
        FlowSolution sol =
            solve_darcy(m, sigma, cutoff_field(phi, cfg.spec.delta), gamma_v_field(cfg.model, phi, sigma), dp);
        v = std::move(sol.v);
        p = std::move(sol.p);
        return;
    }
    FlowSolution sol = brinkman.solve(frozen_brinkman(cfg, phi, sigma, L));
    v = std::move(sol.v);
    p = std::move(sol.p);
}

struct InnerResult {
    Vector phi, mu;
    int iterations = 0;
};

// Newton solve of the stabilized fourth-order equation with frozen sigma, v, F.
InnerResult inner_newton(const StationaryConfig& cfg, const SparseMatrix& L, const Vector& phi0, const Vector& mu0,
                         const ScalarField& sigma, const Vector& convection, double F) {
    const int n = static_cast<int>(phi0.size());
    const PotentialSpec& spec = cfg.spec;
    const double sd = std::sqrt(spec.delta), theta = spec.theta_cap, chi = cfg.params.chi;
    Vector r1(n), r2(n);
    auto residual = [&](const Vector& ph, const Vector& m) {
        r1 = L * m + convection + F * ph;
        r2 = m - L * ph + chi * sigma.values;
        for (int c = 0; c < n; ++c) {
            const double b = beta(spec, ph[c]);
            r1[c] += sd * b + gamma_stationary(cfg.model, ph[c], sigma.values[c]);
            r2[c] += theta * ph[c] - b;
        }
        return std::max(r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff());
    };
    InnerResult out{phi0, mu0, 0};
    double merit = residual(out.phi, out.mu);
    while (merit > cfg.newton_tol * std::max(1.0, out.mu.cwiseAbs().maxCoeff())) {
        if (out.iterations >= cfg.newton_max)
            throw SolverError("stationary inner Newton did not converge", merit, out.iterations);
        Triplets t;
        t.reserve(static_cast<size_t>(12) * n);
        for (int c = 0; c < n; ++c) {
            const double ph = out.phi[c], bp = beta_prime(spec, ph);
            t.emplace_back(c, c, sd * bp + F + gamma_stationary_dr(cfg.model, ph, sigma.values[c]));
            t.emplace_back(n + c, c, theta - bp);
            t.emplace_back(n + c, n + c, 1.0);
        }
        for (int k = 0; k < L.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(L, k); it; ++it) {
                t.emplace_back(it.row(), n + it.col(), it.value());
                t.emplace_back(n + it.row(), it.col(), -it.value());
            }
        SparseMatrix J(2 * n, 2 * n);
        J.setFromTriplets(t.begin(), t.end());
        Vector rhs(2 * n);
        rhs << -r1, -r2;
        DirectSolver lu;
        lu.factorize(J);
        const Vector dx = lu.solve(rhs);
        double step = 1.0;
        Vector ph, m;
        for (int ls = 0; ls < 12; ++ls) {
            ph = out.phi + step * dx.head(n);
            m = out.mu + step * dx.tail(n);
            const double trial = residual(ph, m);
            if (std::isfinite(trial) && trial <= (1.0 - 1e-4 * step) * merit) break;
            step *= 0.5;
        }
        out.phi = std::move(ph);
        out.mu = std::move(m);
        merit = residual(out.phi, out.mu);
        ++out.iterations;
    }
    return out;
}

}  // namespace

double ghat(double r) {
    const double a = ramp_exp(r - 2.0), b = ramp_exp(3.0 - r);
    return a / (a + b);
}

void StationaryConfig::validate() const {
    grid.validate();
    spec.validate();
    if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("stationary.omega must lie in (0,1]");
    if (!(outer_tol > 0.0)) throw std::invalid_argument("stationary.tol must be positive");
    if (resolved_C_F() < 0.0) throw std::invalid_argument("stationary.CF must be nonnegative");
    if (params.mode == FlowMode::Brinkman) {
        const std::string msg = params.viscosity.check_bounds();
        if (!msg.empty()) throw std::invalid_argument(msg);
    }
}

double StationaryConfig::resolved_C_F() const {
    return C_F >= 0.0 ? C_F : 10.0 * (1.0 + max_abs_gamma(model));
}

double stabilizer_F(const StationaryConfig& cfg, const ScalarField& phi) {
    return cfg.resolved_C_F() * ghat(phi.values.squaredNorm() * phi.grid.cell_volume() / phi.grid.area());
}

double StationaryResidual::max() const { return std::max({r_phi, r_mu, r_sigma, r_flow, r_mean}); }

StationaryResidual stationary_residual(const StationaryState& s, const StationaryConfig& cfg) {
    const Grid2D& g = s.phi.grid;
    const int n = g.cells();
    const SparseMatrix L = neg_laplacian(g);
    const PotentialSpec& spec = cfg.spec;
    const double F = stabilizer_F(cfg, s.phi);
    const double sd = std::sqrt(spec.delta);
    StationaryResidual r;

    const ScalarField adv_T = advect(s.v, cutoff_field(s.phi, spec.delta));
    const ScalarField adv = advect(s.v, s.phi);
    Vector e_phi = L * s.mu.values + adv_T.values + F * s.phi.values;
    Vector e_mu = s.mu.values - L * s.phi.values + cfg.params.chi * s.sigma.values;
    double mean = 0.0;
    for (int c = 0; c < n; ++c) {
        const double ph = s.phi.values[c], sg = s.sigma.values[c];
        const double gm = gamma_stationary(cfg.model, ph, sg);
        e_phi[c] += sd * beta(spec, ph) + gm;
        e_mu[c] -= psi_prime(spec, ph);
        mean += gm + adv.values[c];
    }
    r.r_phi = dual_norm(e_phi, L, g);
    r.r_mu = std::sqrt(e_mu.squaredNorm() * g.cell_volume());
    r.r_mean = std::abs(mean) * g.cell_volume();

    NutrientProblem np;
    np.phi = s.phi;
    np.h = cfg.params.h;
    np.K = cfg.params.K;
    Vector src;
    SparseMatrix A = neg_laplacian(g, np.boundary(), &src);
    Vector e_sigma = A * s.sigma.values - src;
    for (int c = 0; c < n; ++c) e_sigma[c] += cfg.params.h(s.phi.values[c]) * s.sigma.values[c];
    r.r_sigma = dual_norm(e_sigma, L, g);

    if (cfg.params.mode == FlowMode::Brinkman) {
        const BrinkmanProblem prob = frozen_brinkman(cfg, s.phi, s.sigma, L);
        Vector eta(n), lam(n);
        for (int c = 0; c < n; ++c) {
            eta[c] = prob.viscosity.eta(s.phi.values[c]);
            lam[c] = prob.viscosity.lambda(s.phi.values[c]);
        }
        const SparseMatrix M = brinkman_matrix(g, eta, lam, prob.nu);
        const Vector b = brinkman_rhs(prob);
        Vector x(M.rows());
        x << s.v.stacked(), s.p.values;
        const double nb = b.norm();
        r.r_flow = nb > 0.0 ? (M * x - b).norm() / nb : (M * x).norm();
    } else if (cfg.params.mode == FlowMode::Darcy) {
        const ScalarField gv = gamma_v_field(cfg.model, s.phi, s.sigma);
        const ScalarField d = div(s.v);
        r.r_flow = std::sqrt((d.values - gv.values).squaredNorm() * g.cell_volume());
    } else {
        r.r_flow = s.v.l2_norm();
    }
    return r;
}

StationaryResult solve_stationary(const StationaryConfig& cfg) {
    cfg.validate();
    const Grid2D& g = cfg.grid;
    const SparseMatrix L = neg_laplacian(g);
    StationaryResult res;
    res.C_F = cfg.resolved_C_F();

    ScalarField phi = cfg.initial ? *cfg.initial : ScalarField(g, 0.0);
    if (!(phi.grid == g)) throw GridMismatch();
    if (cfg.strategy == StationaryStrategy::Pseudotime) {
        Simulation sim(g, cfg.spec, cfg.model, cfg.params);
        RunSettings rs;
        rs.t_end = cfg.pseudotime_horizon;
        rs.dt = 10.0 * default_dt(g);
        phi = run(sim, sim.initial_state(phi), rs).final_state.phi;
    }

    BrinkmanSolver brinkman;
    ScalarField sigma = frozen_sigma(cfg, phi);
    Vector mu = L * phi.values - cfg.params.chi * sigma.values;
    for (int c = 0; c < g.cells(); ++c) mu[c] += psi_prime(cfg.spec, phi.values[c]);

    double omega = cfg.omega;
    double previous = INFINITY;
    StationaryState best;
    double best_res = INFINITY;
    for (int k = 0; k < cfg.max_outer; ++k) {
        sigma = frozen_sigma(cfg, phi);
        StaggeredVectorField v;
        ScalarField p;
        frozen_flow(cfg, phi, sigma, L, brinkman, v, p);
        const double F = stabilizer_F(cfg, phi);
        const Vector convection = advect(v, cutoff_field(phi, cfg.spec.delta)).values;
        const InnerResult in = inner_newton(cfg, L, phi.values, mu, sigma, convection, F);

        const double update = (in.phi - phi.values).cwiseAbs().maxCoeff();
        res.history.push_back(update);
        res.outer_iterations = k + 1;

        StationaryState st{ScalarField(g, in.phi), ScalarField(g, in.mu), sigma, p, v};
        if (update <= cfg.outer_tol) {
            const StationaryResidual r = stationary_residual(st, cfg);
            if (r.max() < best_res) {
                best_res = r.max();
                best = st;
                res.residual = r;
            }
            if (r.max() <= 10.0 * cfg.outer_tol) {
                res.converged = true;
                break;
            }
        }
        if (update > previous) omega = std::max(omega * 0.5, 1.0 / 64.0);
        previous = update;
        phi.values = (1.0 - omega) * phi.values + omega * in.phi;
        mu = (1.0 - omega) * mu + omega * in.mu;
        if (!std::isfinite(best_res)) best = st;
    }
    if (!std::isfinite(best_res)) res.residual = stationary_residual(best, cfg);
    res.state = std::move(best);
    res.final_omega = omega;
    res.F_at_solution = stabilizer_F(cfg, res.state.phi);
    const Vector lphi = L * res.state.phi.values;
    res.elliptic_lhs = res.state.phi.values.dot(lphi) * g.cell_volume();
    res.elliptic_rhs = std::sqrt(lphi.squaredNorm() * g.cell_volume()) * res.state.phi.l2_norm();
    return res;
}

}  // namespace chb
