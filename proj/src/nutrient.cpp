#include "chblab/nutrient.hpp"

#include <algorithm>
#include <cmath>

namespace chb {

Profile default_consumption(double h0) {
    return [h0](double r) { return h0 * 0.5 * (1.0 + std::clamp(r, -1.0, 1.0)); };
}

BoundaryCondition NutrientProblem::boundary() const {
    BoundaryCondition bc = BoundaryCondition::robin(K, 1.0);
    bc.sides = robin_sides;
    return bc;
}

ScalarField solve_nutrient(const NutrientProblem& prob, SolveInfo* info) {
    const Grid2D& g = prob.phi.grid;
    if (!(prob.K > 0.0)) throw std::invalid_argument("nutrient.K must be positive");
    if (std::none_of(prob.robin_sides.begin(), prob.robin_sides.end(), [](bool b) { return b; }))
        throw std::invalid_argument("at least one side must carry the Robin condition");

    Vector source;
    SparseMatrix A = neg_laplacian(g, prob.boundary(), &source);
    Vector hd(g.cells());
    for (int c = 0; c < g.cells(); ++c) {
        const double hv = prob.h ? prob.h(prob.phi.values[c]) : 0.0;
        if (hv < 0.0) throw std::invalid_argument("(A3) violated: consumption h must be nonnegative");
        hd[c] = hv;
    }
    A += diagonal_matrix(hd);

    SparseSystem sys{A, source, prob.settings, false};
    const Vector ones = Vector::Ones(g.cells());
    Vector sigma = solve_spd(sys, info, &ones);

    if (prob.clamp_roundoff) {
        const double lo = sigma.minCoeff(), hi = sigma.maxCoeff();
        if (lo < -1e-8 || hi > 1.0 + 1e-8)
            throw SolverError("nutrient solution left [0,1] beyond round-off",
                              std::max(-lo, hi - 1.0), info ? info->iterations : 0);
        sigma = sigma.cwiseMax(0.0).cwiseMin(1.0);
    }
    return ScalarField(g, sigma);
}

NutrientEnergy nutrient_energy(const NutrientProblem& prob, const ScalarField& sigma) {
    const Grid2D& g = sigma.grid;
    const BoundaryCondition bc = prob.boundary();
    NutrientEnergy e;
    StaggeredVectorField gs = grad(sigma);
    e.gradient = face_inner(gs, gs);
    for (int c = 0; c < g.cells(); ++c)
        e.reaction += (prob.h ? prob.h(prob.phi.values[c]) : 0.0) * sigma.values[c] * sigma.values[c];
    e.reaction *= g.cell_volume();
    auto add = [&](int side, double h, double len, double s) {
        const double k = boundary_flux_coefficient(bc, side, h);
        e.boundary_quadratic += k * s * s * len;
        e.boundary_linear += k * s * len;
    };
    for (int j = 0; j < g.ny; ++j) {
        add(0, g.hx(), g.hy(), sigma(0, j));
        add(1, g.hx(), g.hy(), sigma(g.nx - 1, j));
    }
    for (int i = 0; i < g.nx; ++i) {
        add(2, g.hy(), g.hx(), sigma(i, 0));
        add(3, g.hy(), g.hx(), sigma(i, g.ny - 1));
    }
    return e;
}

}  // namespace chb
