#pragma once

#include <array>
#include <functional>

#include "chblab/grid.hpp"
#include "chblab/linalg.hpp"

namespace chb {

using Profile = std::function<double(double)>;

/// h(r) = h0 (1 + clamp(r,-1,1)) / 2: the tumour consumes, the host does not.
Profile default_consumption(double h0);

struct NutrientProblem {
    ScalarField phi;
    Profile h;
    double K = 1.0;
    /// Sides (left, right, bottom, top) carrying the Robin condition; others are insulated.
    std::array<bool, 4> robin_sides{true, true, true, true};
    SolverSettings settings{1e-12, 0, 60};
    /// Remove solver round-off outside [0,1] (never more than 1e-8).
    bool clamp_roundoff = true;

    BoundaryCondition boundary() const;
};

/// Solves -lap(sigma) + h(phi) sigma = 0 with d_n sigma = K (1 - sigma).
ScalarField solve_nutrient(const NutrientProblem& prob, SolveInfo* info = nullptr);

/// Terms of the tested identity  |grad s|^2 + h s^2 + K_eff s_b^2 = K_eff s_b.
struct NutrientEnergy {
    double gradient = 0.0;
    double reaction = 0.0;
    double boundary_quadratic = 0.0;
    double boundary_linear = 0.0;
};
NutrientEnergy nutrient_energy(const NutrientProblem& prob, const ScalarField& sigma);

}  // namespace chb
