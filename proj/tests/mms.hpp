#pragma once

// Manufactured Brinkman solution with variable viscosity on the unit square.

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "chblab/flow.hpp"

namespace mms {

inline double cfield(double x, double y) { return 0.8 * std::cos(M_PI * x) * std::cos(M_PI * y); }
inline double eta_of(double c) { return 1.0 + 0.5 * c; }
inline double lambda_of(double c) { return 0.3 + 0.2 * c; }

inline double u_ex(double x, double y) { return std::sin(2 * x + y); }
inline double v_ex(double x, double y) { return x * std::cos(x - y); }
inline double p_ex(double x, double y) { return std::cos(x) * std::exp(y); }

inline Eigen::Matrix2d stress(double x, double y) {
    const double ux = 2 * std::cos(2 * x + y), uy = std::cos(2 * x + y);
    const double vx = std::cos(x - y) - x * std::sin(x - y), vy = x * std::sin(x - y);
    const double c = cfield(x, y), e = eta_of(c), l = lambda_of(c);
    const double d = ux + vy, p = p_ex(x, y);
    Eigen::Matrix2d T;
    T << 2 * e * ux + l * d - p, e * (uy + vx), e * (uy + vx), 2 * e * vy + l * d - p;
    return T;
}

inline double divergence(double x, double y) { return 2 * std::cos(2 * x + y) + x * std::sin(x - y); }

// -div T + nu v, with div T by central differences of the exact stress
inline Eigen::Vector2d body_force(double x, double y, double nu) {
    const double e = 1e-5;
    const Eigen::Matrix2d dTx = (stress(x + e, y) - stress(x - e, y)) / (2 * e);
    const Eigen::Matrix2d dTy = (stress(x, y + e) - stress(x, y - e)) / (2 * e);
    return Eigen::Vector2d(-(dTx(0, 0) + dTy(0, 1)) + nu * u_ex(x, y), -(dTx(1, 0) + dTy(1, 1)) + nu * v_ex(x, y));
}

/// Returns (velocity L2 error, pressure L2 error) on an n x n grid.
inline std::pair<double, double> brinkman_error(int n) {
    using namespace chb;
    const double nu = 1.0;
    const Grid2D g = Grid2D::make(n, n);
    BrinkmanProblem p;
    p.c = ScalarField(g);
    p.g = ScalarField(g);
    p.f = StaggeredVectorField(g);
    p.nu = nu;
    p.viscosity = ViscosityProfile::constant_profile(1.0, 0.0);
    p.viscosity.eta = eta_of;
    p.viscosity.lambda = lambda_of;
    p.viscosity.eta0 = 0.6;
    p.viscosity.eta1 = 1.4;
    p.viscosity.lambda0 = 0.5;
    p.viscosity.constant = false;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            p.c(i, j) = cfield(g.xc(i), g.yc(j));
            p.g(i, j) = divergence(g.xc(i), g.yc(j));
        }
    StaggeredVectorField exact(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            p.f.ux(i, j) = body_force(g.xf(i), g.yc(j), nu).x();
            exact.ux(i, j) = u_ex(g.xf(i), g.yc(j));
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            p.f.vy(i, j) = body_force(g.xc(i), g.yf(j), nu).y();
            exact.vy(i, j) = v_ex(g.xc(i), g.yf(j));
        }
    p.traction = [](int side, double x, double y) {
        static const Eigen::Vector2d normals[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        return Eigen::Vector2d(stress(x, y) * normals[side]);
    };
    const FlowSolution s = solve_brinkman(p);
    StaggeredVectorField d = s.v;
    d.u -= exact.u;
    d.v -= exact.v;
    ScalarField dp = s.p;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) dp(i, j) -= p_ex(g.xc(i), g.yc(j));
    return {d.l2_norm(), dp.l2_norm()};
}

}  // namespace mms
