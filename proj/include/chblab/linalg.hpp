#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "chblab/grid.hpp"

namespace chb {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<double>>;

struct SolverSettings {
    double tol = 1e-10;
    int max_iter = 0;  // 0 means 20 * n
    int restart = 60;
};

/// Linear system plus solver settings. When singular_neumann is set the
/// matrix has the constants as nullspace; the right-hand side is made
/// mean-free and the returned solution has zero mean.
struct SparseSystem {
    SparseMatrix matrix;
    Vector rhs;
    SolverSettings settings;
    bool singular_neumann = false;
};

struct SolveInfo {
    int iterations = 0;
    double residual = 0.0;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                             std::to_string(iterations) + " iterations)"),
          residual(residual),
          iterations(iterations) {}
    double residual;
    int iterations;
};

using Preconditioner = std::function<Vector(const Vector&)>;

/// Jacobi-preconditioned conjugate gradients.
Vector solve_spd(const SparseSystem& sys, SolveInfo* info = nullptr, const Vector* x0 = nullptr);

/// Restarted GMRES with optional right preconditioner.
Vector solve_general(const SparseSystem& sys, SolveInfo* info = nullptr,
                     const Preconditioner& precond = nullptr, const Vector* x0 = nullptr);

/// Sparse LU factorization (library-backed) for the saddle-point and CH blocks.
class DirectSolver {
public:
    void factorize(const SparseMatrix& a);
    Vector solve(const Vector& b) const;
    bool ready() const { return static_cast<bool>(lu_); }
    void reset() { lu_.reset(); }

private:
    using ColMatrix = Eigen::SparseMatrix<double>;
    std::shared_ptr<Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

/// Five-point matrix L with -laplace(phi, bc) = L phi - boundary_source.
SparseMatrix neg_laplacian(const Grid2D& g, const BoundaryCondition& bc = BoundaryCondition::neumann(),
                           Vector* boundary_source = nullptr);

SparseMatrix identity_matrix(int n);
SparseMatrix diagonal_matrix(const Vector& d);

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b);

}  // namespace chb
