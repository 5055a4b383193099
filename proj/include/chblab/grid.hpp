#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>

namespace chb {

using Vector = Eigen::VectorXd;

/// Uniform rectangular grid on [0,lx] x [0,ly] with nx*ny cells.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;

    static Grid2D make(int nx, int ny, double lx = 1.0, double ly = 1.0);
    void validate() const;

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double cell_volume() const { return hx() * hy(); }
    double area() const { return lx * ly; }
    double perimeter() const { return 2.0 * (lx + ly); }

    int cells() const { return nx * ny; }
    int u_faces() const { return (nx + 1) * ny; }
    int v_faces() const { return nx * (ny + 1); }

    int cell(int i, int j) const { return i + nx * j; }
    int u_face(int i, int j) const { return i + (nx + 1) * j; }
    int v_face(int i, int j) const { return i + nx * j; }

    double xc(int i) const { return (i + 0.5) * hx(); }
    double yc(int j) const { return (j + 0.5) * hy(); }
    double xf(int i) const { return i * hx(); }
    double yf(int j) const { return j * hy(); }

    bool operator==(const Grid2D& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

class GridMismatch : public std::invalid_argument {
public:
    GridMismatch() : std::invalid_argument("fields live on different grids") {}
};

/// Cell-centred scalar field.
struct ScalarField {
    Grid2D grid;
    Vector values;

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0);
    ScalarField(const Grid2D& g, Vector v);

    double& operator()(int i, int j) { return values[grid.cell(i, j)]; }
    double operator()(int i, int j) const { return values[grid.cell(i, j)]; }

    double integral() const { return values.sum() * grid.cell_volume(); }
    double mean() const { return values.mean(); }
    double max_abs() const { return values.cwiseAbs().maxCoeff(); }
    double l2_norm() const { return std::sqrt(values.squaredNorm() * grid.cell_volume()); }
};

/// MAC vector field: u on vertical faces, v on horizontal faces.
struct StaggeredVectorField {
    Grid2D grid;
    Vector u;
    Vector v;

    StaggeredVectorField() = default;
    explicit StaggeredVectorField(const Grid2D& g);

    double& ux(int i, int j) { return u[grid.u_face(i, j)]; }
    double ux(int i, int j) const { return u[grid.u_face(i, j)]; }
    double& vy(int i, int j) { return v[grid.v_face(i, j)]; }
    double vy(int i, int j) const { return v[grid.v_face(i, j)]; }

    /// Stacked (u, v) vector.
    Vector stacked() const;
    static StaggeredVectorField from_stacked(const Grid2D& g, const Vector& x);

    double max_abs() const;
    /// Discrete L2 norm with face control volumes.
    double l2_norm() const;
};

/// Control-volume weights of the faces (half cells on the boundary).
Vector u_face_weights(const Grid2D& g);
Vector v_face_weights(const Grid2D& g);

enum class BoundaryKind { Neumann, Robin, Dirichlet };

/// Side order: left, right, bottom, top. Inactive sides are insulated.
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Neumann;
    double K = 0.0;
    double value = 0.0;
    std::array<bool, 4> sides{true, true, true, true};

    static BoundaryCondition neumann() { return {}; }
    static BoundaryCondition robin(double K, double value = 1.0) {
        return {BoundaryKind::Robin, K, value, {true, true, true, true}};
    }
    static BoundaryCondition dirichlet(double value = 0.0) {
        return {BoundaryKind::Dirichlet, 0.0, value, {true, true, true, true}};
    }
};

/// Outward normal derivative at a boundary face as coefficient * (value - phi_cell);
/// returns the coefficient for spacing h normal to that side.
double boundary_flux_coefficient(const BoundaryCondition& bc, int side, double h);

StaggeredVectorField grad(const ScalarField& phi,
                          const BoundaryCondition& bc = BoundaryCondition::neumann());
ScalarField div(const StaggeredVectorField& w);
ScalarField laplace(const ScalarField& phi,
                    const BoundaryCondition& bc = BoundaryCondition::neumann());

/// Face gradient averaged to cell centres (x and y components).
std::pair<ScalarField, ScalarField> cell_gradient(const ScalarField& phi);

/// sum over faces of a.b times control volume (interior plus half boundary faces).
double face_inner(const StaggeredVectorField& a, const StaggeredVectorField& b);
/// sum over cells of a*b times cell volume.
double cell_inner(const ScalarField& a, const ScalarField& b);
/// Boundary integral of (w.n) phi using the cell value adjacent to each face.
double boundary_flux_pairing(const StaggeredVectorField& w, const ScalarField& phi);

/// Cell average of w . face-gradient(c), i.e. the discrete transport term w.grad c.
ScalarField advect(const StaggeredVectorField& w, const ScalarField& c);

}  // namespace chb
