#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "chblab/grid.hpp"
#include "chblab/linalg.hpp"

namespace chb {

/// Shear and bulk viscosities as functions of the phase field.
struct ViscosityProfile {
    std::function<double(double)> eta;
    std::function<double(double)> lambda;
    double eta0 = 1.0;
    double eta1 = 1.0;
    double lambda0 = 0.0;
    bool constant = true;

    static ViscosityProfile constant_profile(double eta, double lambda);
    /// eta moves from eta0 (phi=-1) to eta1 (phi=1) linearly, lambda from 0 to lambda0.
    static ViscosityProfile linear_in_phi(double eta0, double eta1, double lambda0);

    /// Samples [-2,2]; returns an empty string or a description of the violated bound.
    std::string check_bounds() const;
};

/// Boundary traction T n on side (0 left, 1 right, 2 bottom, 3 top) at point (x, y).
using TractionFn = std::function<Eigen::Vector2d(int side, double x, double y)>;

struct BrinkmanProblem {
    ScalarField c;
    StaggeredVectorField f;
    ScalarField g;
    double nu = 1.0;
    ViscosityProfile viscosity;
    TractionFn traction;  // empty means T n = 0
    SolverSettings settings;
};

struct FlowSolution {
    StaggeredVectorField v;
    ScalarField p;
    double residual = 0.0;
};

/// Brinkman saddle-point solver; keeps the LU factorization while the
/// viscosity coefficients and friction stay the same.
class BrinkmanSolver {
public:
    FlowSolution solve(const BrinkmanProblem& prob);
    int factorizations() const { return factorizations_; }

private:
    DirectSolver lu_;
    Vector cached_eta_, cached_lambda_;
    double cached_nu_ = -1.0;
    Grid2D cached_grid_;
    int factorizations_ = 0;
};

FlowSolution solve_brinkman(const BrinkmanProblem& prob);

/// System matrix of the discrete saddle-point problem, unknowns ordered (u, v, p).
SparseMatrix brinkman_matrix(const Grid2D& g, const Vector& eta_cell, const Vector& lambda_cell, double nu);
/// Right-hand side for body force, divergence and traction data.
Vector brinkman_rhs(const BrinkmanProblem& prob);

/// Terms of the discrete energy identity  a(v,v) = (f,v) + (p,g) + traction work.
struct BrinkmanEnergy {
    double viscous = 0.0;
    double friction = 0.0;
    double forcing = 0.0;
    double pressure_divergence = 0.0;
    double traction_work = 0.0;
};
BrinkmanEnergy brinkman_energy(const BrinkmanProblem& prob, const FlowSolution& sol);

/// Discrete 2 eta |Dv|^2 + lambda (div v)^2 integrated over the domain.
double viscous_dissipation(const StaggeredVectorField& v, const ScalarField& c, const ViscosityProfile& visc);

struct DarcyParams {
    double nu = 1.0;
    double chi = 0.0;
    SolverSettings settings;
};

/// Pressure Poisson with p = 0 on the boundary, velocity from the Darcy law.
FlowSolution solve_darcy(const ScalarField& mu, const ScalarField& sigma, const ScalarField& phi,
                         const ScalarField& g, const DarcyParams& params);

/// Face body force (mu + chi sigma) grad phi.
StaggeredVectorField capillary_force(const ScalarField& mu, const ScalarField& sigma, const ScalarField& phi,
                                     double chi);
/// Face body force m grad c for an arbitrary cell coefficient m.
StaggeredVectorField face_force(const ScalarField& m, const ScalarField& c);

struct LiftResult {
    StaggeredVectorField u;
    double boundary_flux = 0.0;  // prescribed normal flux density  int f / |Sigma|
    double h1_constant = 0.0;    // ||u||_{H^1} / ||f||_{L^2}
};

/// D(f): gradient of a Neumann potential with div u = f and uniform normal flux.
LiftResult divergence_lift(const ScalarField& f, const SolverSettings& settings = {});

/// Discrete H^1 norm of a face field (face L2 plus difference quotients).
double face_h1_norm(const StaggeredVectorField& w);

}  // namespace chb
