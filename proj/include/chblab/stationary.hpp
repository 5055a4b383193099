#pragma once

#include <optional>
#include <vector>

#include "chblab/evolution.hpp"

namespace chb {

enum class StationaryStrategy { Picard, Pseudotime };

struct StationaryConfig {
    Grid2D grid;
    PotentialSpec spec;
    SourceModel model;
    ModelParams params;
    double C_F = -1.0;  // negative selects 10 (1 + max|gamma|)
    double omega = 0.5;
    double outer_tol = 1e-8;
    int max_outer = 400;
    double newton_tol = 1e-12;
    int newton_max = 40;
    StationaryStrategy strategy = StationaryStrategy::Picard;
    double pseudotime_horizon = 5.0;
    std::optional<ScalarField> initial;  // default: uniform 0

    /// Throws std::invalid_argument when C_F < 0 after defaulting or omega is outside (0,1].
    void validate() const;
    double resolved_C_F() const;
};

/// Smooth switch: 0 on (-inf,2], 1 on [3,inf), C-infinity and monotone between.
double ghat(double r);

/// C_F ghat(|Omega|^-1 ||phi||^2).
double stabilizer_F(const StationaryConfig& cfg, const ScalarField& phi);

struct StationaryResidual {
    double r_phi = 0.0;    // dual norm of the regularized phi equation
    double r_mu = 0.0;     // L2 norm of the chemical potential relation
    double r_sigma = 0.0;  // dual norm of the nutrient equation
    double r_flow = 0.0;   // relative residual of the Brinkman system
    double r_mean = 0.0;   // |int gamma(phi,sigma) + v . grad phi|
    double max() const;
};

struct StationaryState {
    ScalarField phi, mu, sigma, p;
    StaggeredVectorField v;
};

StationaryResidual stationary_residual(const StationaryState& state, const StationaryConfig& cfg);

struct StationaryResult {
    StationaryState state;
    StationaryResidual residual;
    bool converged = false;
    int outer_iterations = 0;
    std::vector<double> history;  // update norm per outer iteration
    double C_F = 0.0;
    double F_at_solution = 0.0;
    double final_omega = 0.0;
    // elliptic check  ||grad phi||^2 <= ||lap phi|| ||phi||
    double elliptic_lhs = 0.0;
    double elliptic_rhs = 0.0;
};

/// Throws SolverError on inner Newton failure; outer non-convergence is
/// reported through converged = false with the best iterate.
StationaryResult solve_stationary(const StationaryConfig& cfg);

}  // namespace chb
