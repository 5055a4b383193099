#include "chblab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace chb {

namespace {

struct Layout {
    Grid2D g;
    int nu, nv, np;
    int U(int i, int j) const { return g.u_face(i, j); }
    int V(int i, int j) const { return nu + g.v_face(i, j); }
    int P(int i, int j) const { return nu + nv + g.cell(i, j); }
    int size() const { return nu + nv + np; }
};

Layout layout(const Grid2D& g) { return {g, g.u_faces(), g.v_faces(), g.cells()}; }

using Row = std::vector<std::pair<int, double>>;

void add_square(Triplets& t, double w, const Row& row) {
    for (const auto& [a, ca] : row)
        for (const auto& [b, cb] : row) t.emplace_back(a, b, w * ca * cb);
}

double node_average(const Grid2D& g, const Vector& cellv, int i, int j) {
    return 0.25 * (cellv[g.cell(i - 1, j - 1)] + cellv[g.cell(i, j - 1)] + cellv[g.cell(i - 1, j)] +
                   cellv[g.cell(i, j)]);
}

void eval_viscosity(const ScalarField& c, const ViscosityProfile& visc, Vector& eta, Vector& lam) {
    const int n = c.grid.cells();
    eta.resize(n);
    lam.resize(n);
    for (int k = 0; k < n; ++k) {
        eta[k] = visc.eta(c.values[k]);
        lam[k] = visc.lambda(c.values[k]);
    }
}

// Tangential stress T_xy at a boundary node, from the traction data of the given side.
double boundary_shear(const TractionFn& tr, int side, double x, double y) {
    if (!tr) return 0.0;
    const Eigen::Vector2d h = tr(side, x, y);
    switch (side) {
        case 0: return -h.y();
        case 1: return h.y();
        case 2: return -h.x();
        default: return h.x();
    }
}

void check_problem(const BrinkmanProblem& prob) {
    const Grid2D& g = prob.c.grid;
    if (!(prob.f.grid == g) || !(prob.g.grid == g)) throw GridMismatch();
    if (!(prob.nu > 0.0)) throw std::invalid_argument("flow.nu must be positive");
    if (!prob.viscosity.eta || !prob.viscosity.lambda)
        throw std::invalid_argument("viscosity profile is not set");
}

}  // namespace

ViscosityProfile ViscosityProfile::constant_profile(double eta, double lambda) {
    ViscosityProfile p;
    p.eta = [eta](double) { return eta; };
    p.lambda = [lambda](double) { return lambda; };
    p.eta0 = p.eta1 = eta;
    p.lambda0 = lambda;
    p.constant = true;
    return p;
}

ViscosityProfile ViscosityProfile::linear_in_phi(double eta0, double eta1, double lambda0) {
    ViscosityProfile p;
    p.eta = [eta0, eta1](double r) { return eta0 + (eta1 - eta0) * 0.5 * (1.0 + std::clamp(r, -1.0, 1.0)); };
    p.lambda = [lambda0](double r) { return lambda0 * 0.5 * (1.0 + std::clamp(r, -1.0, 1.0)); };
    p.eta0 = std::min(eta0, eta1);
    p.eta1 = std::max(eta0, eta1);
    p.lambda0 = lambda0;
    p.constant = eta0 == eta1 && lambda0 == 0.0;
    return p;
}

std::string ViscosityProfile::check_bounds() const {
    if (!(eta0 > 0.0)) return "(A3) requires eta0 > 0";
    if (lambda0 < 0.0) return "(A3) requires lambda0 >= 0";
    for (int k = 0; k <= 400; ++k) {
        const double r = -2.0 + 4.0 * k / 400.0;
        const double e = eta(r), l = lambda(r);
        if (e < eta0 - 1e-14 || e > eta1 + 1e-14) return "(A3) bound eta0 <= eta <= eta1 violated";
        if (l < -1e-14 || l > lambda0 + 1e-14) return "(A3) bound 0 <= lambda <= lambda0 violated";
    }
    return {};
}

SparseMatrix brinkman_matrix(const Grid2D& g, const Vector& eta, const Vector& lam, double nu) {
    const Layout L = layout(g);
    const double hx = g.hx(), hy = g.hy(), vol = g.cell_volume();
    Triplets t;
    t.reserve(static_cast<size_t>(40) * g.cells());

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell(i, j);
            const Row ux{{L.U(i + 1, j), 1.0 / hx}, {L.U(i, j), -1.0 / hx}};
            const Row vy{{L.V(i, j + 1), 1.0 / hy}, {L.V(i, j), -1.0 / hy}};
            const Row dv{ux[0], ux[1], vy[0], vy[1]};
            add_square(t, 2.0 * eta[c] * vol, ux);
            add_square(t, 2.0 * eta[c] * vol, vy);
            if (lam[c] != 0.0) add_square(t, lam[c] * vol, dv);
            // pressure coupling: continuity row is -div * vol
            const int pc = L.P(i, j);
            const std::pair<int, double> b[4] = {
                {L.U(i + 1, j), -hy}, {L.U(i, j), hy}, {L.V(i, j + 1), -hx}, {L.V(i, j), hx}};
            for (const auto& [k, val] : b) {
                t.emplace_back(pc, k, val);
                t.emplace_back(k, pc, val);
            }
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const Row shear{{L.U(i, j), 1.0 / hy}, {L.U(i, j - 1), -1.0 / hy},
                            {L.V(i, j), 1.0 / hx}, {L.V(i - 1, j), -1.0 / hx}};
            add_square(t, node_average(g, eta, i, j) * vol, shear);
        }
    }
    const Vector wu = u_face_weights(g), wv = v_face_weights(g);
    for (int k = 0; k < L.nu; ++k) t.emplace_back(k, k, nu * wu[k]);
    for (int k = 0; k < L.nv; ++k) t.emplace_back(L.nu + k, L.nu + k, nu * wv[k]);

    SparseMatrix A(L.size(), L.size());
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

namespace {

Vector traction_rhs(const Grid2D& g, const TractionFn& tr) {
    const Layout L = layout(g);
    Vector b = Vector::Zero(L.size());
    if (!tr) return b;
    const double hx = g.hx(), hy = g.hy(), lx = g.lx, ly = g.ly;
    // normal stresses on boundary faces
    for (int j = 0; j < g.ny; ++j) {
        b[L.U(0, j)] += tr(0, 0.0, g.yc(j)).x() * hy;
        b[L.U(g.nx, j)] += tr(1, lx, g.yc(j)).x() * hy;
    }
    for (int i = 0; i < g.nx; ++i) {
        b[L.V(i, 0)] += tr(2, g.xc(i), 0.0).y() * hx;
        b[L.V(i, g.ny)] += tr(3, g.xc(i), ly).y() * hx;
    }
    // shear stresses at boundary nodes
    auto u_node = [&](int i, int j, bool& known) {
        known = true;
        if (j == 0) return boundary_shear(tr, 2, g.xf(i), 0.0);
        if (j == g.ny) return boundary_shear(tr, 3, g.xf(i), ly);
        if (i == 0) return boundary_shear(tr, 0, 0.0, g.yf(j));
        if (i == g.nx) return boundary_shear(tr, 1, lx, g.yf(j));
        known = false;
        return 0.0;
    };
    auto v_node = [&](int i, int j, bool& known) {
        known = true;
        if (i == 0) return boundary_shear(tr, 0, 0.0, g.yf(j));
        if (i == g.nx) return boundary_shear(tr, 1, lx, g.yf(j));
        if (j == 0) return boundary_shear(tr, 2, g.xf(i), 0.0);
        if (j == g.ny) return boundary_shear(tr, 3, g.xf(i), ly);
        known = false;
        return 0.0;
    };
    bool known = false;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double len = (i == 0 || i == g.nx) ? 0.5 * hx : hx;
            double s = u_node(i, j + 1, known);
            if (known) b[L.U(i, j)] += s * len;
            s = u_node(i, j, known);
            if (known) b[L.U(i, j)] -= s * len;
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double len = (j == 0 || j == g.ny) ? 0.5 * hy : hy;
            double s = v_node(i + 1, j, known);
            if (known) b[L.V(i, j)] += s * len;
            s = v_node(i, j, known);
            if (known) b[L.V(i, j)] -= s * len;
        }
    }
    return b;
}

}  // namespace

Vector brinkman_rhs(const BrinkmanProblem& prob) {
    const Grid2D& g = prob.c.grid;
    const Layout L = layout(g);
    Vector b = traction_rhs(g, prob.traction);
    const Vector wu = u_face_weights(g), wv = v_face_weights(g);
    b.head(L.nu) += prob.f.u.cwiseProduct(wu);
    b.segment(L.nu, L.nv) += prob.f.v.cwiseProduct(wv);
    b.tail(L.np) = -prob.g.values * g.cell_volume();
    return b;
}

FlowSolution BrinkmanSolver::solve(const BrinkmanProblem& prob) {
    check_problem(prob);
    const Grid2D& g = prob.c.grid;
    Vector eta, lam;
    eval_viscosity(prob.c, prob.viscosity, eta, lam);
    const SparseMatrix A = brinkman_matrix(g, eta, lam, prob.nu);
    const bool reuse = lu_.ready() && cached_grid_ == g && cached_nu_ == prob.nu &&
                       cached_eta_.size() == eta.size() && cached_eta_ == eta && cached_lambda_ == lam;
    if (!reuse) {
        lu_.factorize(A);
        cached_eta_ = eta;
        cached_lambda_ = lam;
        cached_nu_ = prob.nu;
        cached_grid_ = g;
        ++factorizations_;
    }
    const Vector b = brinkman_rhs(prob);
    Vector x = lu_.solve(b);
    double res = relative_residual(A, x, b);
    // one step of iterative refinement keeps the saddle solve at round-off
    if (res > prob.settings.tol * 1e-2) {
        x += lu_.solve(b - A * x);
        res = relative_residual(A, x, b);
    }
    if (!(res <= std::max(prob.settings.tol, 1e-12)))
        throw SolverError("Brinkman saddle-point solve inaccurate", res, 1);
    const Layout L = layout(g);
    FlowSolution sol;
    sol.v = StaggeredVectorField::from_stacked(g, x.head(L.nu + L.nv));
    sol.p = ScalarField(g, x.tail(L.np));
    sol.residual = res;
    return sol;
}

FlowSolution solve_brinkman(const BrinkmanProblem& prob) {
    BrinkmanSolver s;
    return s.solve(prob);
}

double viscous_dissipation(const StaggeredVectorField& w, const ScalarField& c, const ViscosityProfile& visc) {
    const Grid2D& g = w.grid;
    Vector eta, lam;
    eval_viscosity(c, visc, eta, lam);
    const double hx = g.hx(), hy = g.hy(), vol = g.cell_volume();
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.cell(i, j);
            const double ux = (w.ux(i + 1, j) - w.ux(i, j)) / hx;
            const double vy = (w.vy(i, j + 1) - w.vy(i, j)) / hy;
            s += vol * (2.0 * eta[k] * (ux * ux + vy * vy) + lam[k] * (ux + vy) * (ux + vy));
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double sh = (w.ux(i, j) - w.ux(i, j - 1)) / hy + (w.vy(i, j) - w.vy(i - 1, j)) / hx;
            s += vol * node_average(g, eta, i, j) * sh * sh;
        }
    return s;
}

BrinkmanEnergy brinkman_energy(const BrinkmanProblem& prob, const FlowSolution& sol) {
    BrinkmanEnergy e;
    e.viscous = viscous_dissipation(sol.v, prob.c, prob.viscosity);
    e.friction = prob.nu * face_inner(sol.v, sol.v);
    e.forcing = face_inner(prob.f, sol.v);
    e.pressure_divergence = cell_inner(sol.p, prob.g);
    const Vector tb = traction_rhs(prob.c.grid, prob.traction);
    const Vector x = sol.v.stacked();
    e.traction_work = tb.head(x.size()).dot(x);
    return e;
}

StaggeredVectorField face_force(const ScalarField& m, const ScalarField& c) {
    const Grid2D& g = c.grid;
    if (!(m.grid == g)) throw GridMismatch();
    StaggeredVectorField f = grad(c);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.ux(i, j) *= 0.5 * (m(i - 1, j) + m(i, j));
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.vy(i, j) *= 0.5 * (m(i, j - 1) + m(i, j));
    return f;
}

StaggeredVectorField capillary_force(const ScalarField& mu, const ScalarField& sigma, const ScalarField& phi,
                                     double chi) {
    ScalarField m(mu.grid, mu.values + chi * sigma.values);
    return face_force(m, phi);
}

FlowSolution solve_darcy(const ScalarField& mu, const ScalarField& sigma, const ScalarField& phi,
                         const ScalarField& g, const DarcyParams& params) {
    const Grid2D& grid = phi.grid;
    if (!(mu.grid == grid) || !(sigma.grid == grid) || !(g.grid == grid)) throw GridMismatch();
    if (!(params.nu > 0.0)) throw std::invalid_argument("flow.nu must be positive");
    const StaggeredVectorField F = capillary_force(mu, sigma, phi, params.chi);
    // (1/nu)(-lap_D p) = g - (1/nu) div F
    const SparseMatrix L = neg_laplacian(grid, BoundaryCondition::dirichlet(0.0));
    const Vector rhs = params.nu * g.values - div(F).values;
    SparseSystem sys{L, rhs, params.settings, false};
    SolveInfo info;
    FlowSolution sol;
    sol.p = ScalarField(grid, solve_spd(sys, &info));
    const StaggeredVectorField gp = grad(sol.p, BoundaryCondition::dirichlet(0.0));
    sol.v = StaggeredVectorField(grid);
    sol.v.u = -(gp.u - F.u) / params.nu;
    sol.v.v = -(gp.v - F.v) / params.nu;
    sol.residual = info.residual;
    return sol;
}

double face_h1_norm(const StaggeredVectorField& w) {
    const Grid2D& g = w.grid;
    double s = face_inner(w, w);
    const double vol = g.cell_volume();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double du = (w.ux(i + 1, j) - w.ux(i, j)) / g.hx();
            const double dv = (w.vy(i, j + 1) - w.vy(i, j)) / g.hy();
            s += vol * (du * du + dv * dv);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const double d = (w.ux(i, j) - w.ux(i, j - 1)) / g.hy();
            s += vol * (i == 0 || i == g.nx ? 0.5 : 1.0) * d * d;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double d = (w.vy(i, j) - w.vy(i - 1, j)) / g.hx();
            s += vol * (j == 0 || j == g.ny ? 0.5 : 1.0) * d * d;
        }
    return std::sqrt(s);
}

LiftResult divergence_lift(const ScalarField& f, const SolverSettings& settings) {
    const Grid2D& g = f.grid;
    LiftResult res;
    res.boundary_flux = f.integral() / g.perimeter();
    const double F = res.boundary_flux;
    // boundary faces carry the prescribed flux, so the interior potential solves
    // -lap_N q = -(f - b) with b the boundary contribution to div
    Vector b = Vector::Zero(g.cells());
    for (int j = 0; j < g.ny; ++j) {
        b[g.cell(0, j)] += F / g.hx();
        b[g.cell(g.nx - 1, j)] += F / g.hx();
    }
    for (int i = 0; i < g.nx; ++i) {
        b[g.cell(i, 0)] += F / g.hy();
        b[g.cell(i, g.ny - 1)] += F / g.hy();
    }
    SparseSystem sys{neg_laplacian(g), -(f.values - b), settings, true};
    const ScalarField q(g, solve_spd(sys));
    res.u = grad(q);
    for (int j = 0; j < g.ny; ++j) {
        res.u.ux(0, j) = -F;
        res.u.ux(g.nx, j) = F;
    }
    for (int i = 0; i < g.nx; ++i) {
        res.u.vy(i, 0) = -F;
        res.u.vy(i, g.ny) = F;
    }
    const double nf = f.l2_norm();
    res.h1_constant = nf > 0.0 ? face_h1_norm(res.u) / nf : 0.0;
    return res;
}

}  // namespace chb
