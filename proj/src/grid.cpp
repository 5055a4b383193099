#include "chblab/grid.hpp"

#include <cmath>
#include <string>

namespace chb {

Grid2D Grid2D::make(int nx, int ny, double lx, double ly) {
    Grid2D g{nx, ny, lx, ly};
    g.validate();
    return g;
}

void Grid2D::validate() const {
    if (nx < 4 || ny < 4)
        throw std::invalid_argument("grid needs at least 4 cells per direction");
    if (!(lx > 0.0) || !(ly > 0.0))
        throw std::invalid_argument("grid extents must be positive");
}

ScalarField::ScalarField(const Grid2D& g, double fill) : grid(g), values(Vector::Constant(g.cells(), fill)) {}

ScalarField::ScalarField(const Grid2D& g, Vector v) : grid(g), values(std::move(v)) {
    if (values.size() != g.cells()) throw std::invalid_argument("cell field has wrong length");
}

StaggeredVectorField::StaggeredVectorField(const Grid2D& g)
    : grid(g), u(Vector::Zero(g.u_faces())), v(Vector::Zero(g.v_faces())) {}

Vector StaggeredVectorField::stacked() const {
    Vector x(u.size() + v.size());
    x << u, v;
    return x;
}

StaggeredVectorField StaggeredVectorField::from_stacked(const Grid2D& g, const Vector& x) {
    StaggeredVectorField w(g);
    if (x.size() != g.u_faces() + g.v_faces())
        throw std::invalid_argument("stacked velocity has wrong length");
    w.u = x.head(g.u_faces());
    w.v = x.segment(g.u_faces(), g.v_faces());
    return w;
}

double StaggeredVectorField::max_abs() const {
    double m = 0.0;
    if (u.size()) m = u.cwiseAbs().maxCoeff();
    if (v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

double StaggeredVectorField::l2_norm() const { return std::sqrt(face_inner(*this, *this)); }

Vector u_face_weights(const Grid2D& g) {
    Vector w = Vector::Constant(g.u_faces(), g.cell_volume());
    for (int j = 0; j < g.ny; ++j) {
        w[g.u_face(0, j)] *= 0.5;
        w[g.u_face(g.nx, j)] *= 0.5;
    }
    return w;
}

Vector v_face_weights(const Grid2D& g) {
    Vector w = Vector::Constant(g.v_faces(), g.cell_volume());
    for (int i = 0; i < g.nx; ++i) {
        w[g.v_face(i, 0)] *= 0.5;
        w[g.v_face(i, g.ny)] *= 0.5;
    }
    return w;
}

double boundary_flux_coefficient(const BoundaryCondition& bc, int side, double h) {
    if (!bc.sides[side]) return 0.0;
    switch (bc.kind) {
        case BoundaryKind::Neumann: return 0.0;
        case BoundaryKind::Dirichlet: return 2.0 / h;
        case BoundaryKind::Robin: return 2.0 * bc.K / (2.0 + bc.K * h);
    }
    return 0.0;
}

StaggeredVectorField grad(const ScalarField& phi, const BoundaryCondition& bc) {
    const Grid2D& g = phi.grid;
    StaggeredVectorField w(g);
    const double hx = g.hx(), hy = g.hy();
    const double cl = boundary_flux_coefficient(bc, 0, hx), cr = boundary_flux_coefficient(bc, 1, hx);
    const double cb = boundary_flux_coefficient(bc, 2, hy), ct = boundary_flux_coefficient(bc, 3, hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) w.ux(i, j) = (phi(i, j) - phi(i - 1, j)) / hx;
        // outward normal is -x on the left, +x on the right
        w.ux(0, j) = -cl * (bc.value - phi(0, j));
        w.ux(g.nx, j) = cr * (bc.value - phi(g.nx - 1, j));
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 1; j < g.ny; ++j) w.vy(i, j) = (phi(i, j) - phi(i, j - 1)) / hy;
        w.vy(i, 0) = -cb * (bc.value - phi(i, 0));
        w.vy(i, g.ny) = ct * (bc.value - phi(i, g.ny - 1));
    }
    return w;
}

ScalarField div(const StaggeredVectorField& w) {
    const Grid2D& g = w.grid;
    ScalarField d(g);
    const double hx = g.hx(), hy = g.hy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d(i, j) = (w.ux(i + 1, j) - w.ux(i, j)) / hx + (w.vy(i, j + 1) - w.vy(i, j)) / hy;
    return d;
}

ScalarField laplace(const ScalarField& phi, const BoundaryCondition& bc) { return div(grad(phi, bc)); }

std::pair<ScalarField, ScalarField> cell_gradient(const ScalarField& phi) {
    const Grid2D& g = phi.grid;
    const auto w = grad(phi);
    ScalarField gx(g), gy(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            gx(i, j) = 0.5 * (w.ux(i, j) + w.ux(i + 1, j));
            gy(i, j) = 0.5 * (w.vy(i, j) + w.vy(i, j + 1));
        }
    return {gx, gy};
}

double face_inner(const StaggeredVectorField& a, const StaggeredVectorField& b) {
    if (!(a.grid == b.grid)) throw GridMismatch();
    const Vector wu = u_face_weights(a.grid), wv = v_face_weights(a.grid);
    return (a.u.array() * b.u.array() * wu.array()).sum() + (a.v.array() * b.v.array() * wv.array()).sum();
}

double cell_inner(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw GridMismatch();
    return a.values.dot(b.values) * a.grid.cell_volume();
}

double boundary_flux_pairing(const StaggeredVectorField& w, const ScalarField& phi) {
    if (!(w.grid == phi.grid)) throw GridMismatch();
    const Grid2D& g = w.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        s += g.hy() * (w.ux(g.nx, j) * phi(g.nx - 1, j) - w.ux(0, j) * phi(0, j));
    for (int i = 0; i < g.nx; ++i)
        s += g.hx() * (w.vy(i, g.ny) * phi(i, g.ny - 1) - w.vy(i, 0) * phi(i, 0));
    return s;
}

ScalarField advect(const StaggeredVectorField& w, const ScalarField& c) {
    if (!(w.grid == c.grid)) throw GridMismatch();
    const Grid2D& g = c.grid;
    const auto gc = grad(c);
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = 0.5 * (w.ux(i, j) * gc.ux(i, j) + w.ux(i + 1, j) * gc.ux(i + 1, j) +
                               w.vy(i, j) * gc.vy(i, j) + w.vy(i, j + 1) * gc.vy(i, j + 1));
    return out;
}

}  // namespace chb
