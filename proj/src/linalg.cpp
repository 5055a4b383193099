#include "chblab/linalg.hpp"

#include <cmath>
#include <vector>

namespace chb {

namespace {

int effective_max_iter(const SolverSettings& s, Eigen::Index n) {
    return s.max_iter > 0 ? s.max_iter : static_cast<int>(20 * n);
}

void check_square(const SparseSystem& sys) {
    if (sys.matrix.rows() != sys.matrix.cols())
        throw std::invalid_argument("system matrix is not square");
    if (sys.rhs.size() != sys.matrix.rows())
        throw std::invalid_argument("right-hand side length does not match the matrix");
}

}  // namespace

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
    const double nb = b.norm();
    const double nr = (b - a * x).norm();
    return nb > 0.0 ? nr / nb : nr;
}

Vector solve_spd(const SparseSystem& sys, SolveInfo* info, const Vector* x0) {
    check_square(sys);
    const SparseMatrix& A = sys.matrix;
    const Eigen::Index n = A.rows();
    Vector b = sys.rhs;
    if (sys.singular_neumann) b.array() -= b.mean();

    Vector dinv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = A.coeff(i, i);
        dinv[i] = d > 0.0 ? 1.0 / d : 1.0;
    }

    Vector x = x0 ? *x0 : Vector::Zero(n);
    const double nb = b.norm();
    SolveInfo local;
    if (nb == 0.0) {
        x.setZero();
        if (info) *info = local;
        return x;
    }
    Vector r = b - A * x;
    Vector z = dinv.cwiseProduct(r);
    Vector p = z;
    double rz = r.dot(z);
    const int max_iter = effective_max_iter(sys.settings, n);
    const double target = sys.settings.tol * nb;
    double rn = r.norm();
    int it = 0;
    while (rn > target && it < max_iter) {
        const Vector ap = A * p;
        const double pap = p.dot(ap);
        if (!(pap > 0.0)) break;
        const double alpha = rz / pap;
        x += alpha * p;
        r -= alpha * ap;
        if (sys.singular_neumann) r.array() -= r.mean();
        z = dinv.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        rn = r.norm();
        ++it;
    }
    if (sys.singular_neumann) x.array() -= x.mean();
    // recompute the true residual to guard against drift
    Vector rt = b - A * x;
    if (sys.singular_neumann) rt.array() -= rt.mean();
    local.iterations = it;
    local.residual = rt.norm() / nb;
    if (info) *info = local;
    if (local.residual > 10.0 * sys.settings.tol)
        throw SolverError("conjugate gradients did not converge", local.residual, it);
    return x;
}

Vector solve_general(const SparseSystem& sys, SolveInfo* info, const Preconditioner& precond,
                     const Vector* x0) {
    check_square(sys);
    const SparseMatrix& A = sys.matrix;
    const Eigen::Index n = A.rows();
    const Vector& b = sys.rhs;
    auto M = [&](const Vector& v) { return precond ? precond(v) : v; };

    Vector x = x0 ? *x0 : Vector::Zero(n);
    const double nb = b.norm();
    SolveInfo local;
    if (nb == 0.0) {
        x.setZero();
        if (info) *info = local;
        return x;
    }
    const int m = std::max(1, std::min<int>(sys.settings.restart, static_cast<int>(n)));
    const int max_iter = effective_max_iter(sys.settings, n);
    const double target = sys.settings.tol * nb;

    Vector r = b - A * x;
    double beta = r.norm();
    int total = 0;
    std::vector<Vector> V(m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Vector cs(m), sn(m), g(m + 1);

    while (beta > target && total < max_iter) {
        V[0] = r / beta;
        g.setZero();
        g[0] = beta;
        H.setZero();
        int k = 0;
        for (; k < m && total < max_iter; ++k) {
            Vector w = A * M(V[k]);
            for (int i = 0; i <= k; ++i) {
                H(i, k) = w.dot(V[i]);
                w -= H(i, k) * V[i];
            }
            H(k + 1, k) = w.norm();
            const bool happy = H(k + 1, k) <= 1e-14 * nb;
            if (!happy) V[k + 1] = w / H(k + 1, k);
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            const double den = std::hypot(H(k, k), H(k + 1, k));
            if (den == 0.0) throw SolverError("GMRES breakdown", std::abs(g[k]) / nb, total);
            cs[k] = H(k, k) / den;
            sn[k] = H(k + 1, k) / den;
            H(k, k) = den;
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            ++total;
            if (std::abs(g[k + 1]) <= target || happy) {
                ++k;
                break;
            }
        }
        Vector y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        Vector update = Vector::Zero(n);
        for (int i = 0; i < k; ++i) update += y[i] * V[i];
        x += M(update);
        r = b - A * x;
        beta = r.norm();
    }
    local.iterations = total;
    local.residual = beta / nb;
    if (info) *info = local;
    if (!std::isfinite(local.residual) || local.residual > 10.0 * sys.settings.tol)
        throw SolverError("GMRES did not converge", local.residual, total);
    return x;
}

void DirectSolver::factorize(const SparseMatrix& a) {
    ColMatrix c = a;
    c.makeCompressed();
    auto lu = std::make_shared<Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>>();
    lu->analyzePattern(c);
    lu->factorize(c);
    if (lu->info() != Eigen::Success) {
        lu_.reset();
        throw SolverError("sparse LU factorization failed: " + lu->lastErrorMessage(), INFINITY, 0);
    }
    lu_ = std::move(lu);
}

Vector DirectSolver::solve(const Vector& b) const {
    if (!lu_) throw std::logic_error("DirectSolver::solve called before factorize");
    Vector x = lu_->solve(b);
    if (!x.allFinite()) throw SolverError("sparse LU produced a non-finite solution", INFINITY, 0);
    return x;
}

SparseMatrix neg_laplacian(const Grid2D& g, const BoundaryCondition& bc, Vector* boundary_source) {
    const double hx = g.hx(), hy = g.hy();
    const double ax = 1.0 / (hx * hx), ay = 1.0 / (hy * hy);
    const double side_coef[4] = {boundary_flux_coefficient(bc, 0, hx) / hx,
                                 boundary_flux_coefficient(bc, 1, hx) / hx,
                                 boundary_flux_coefficient(bc, 2, hy) / hy,
                                 boundary_flux_coefficient(bc, 3, hy) / hy};
    Triplets t;
    t.reserve(5 * g.cells());
    if (boundary_source) boundary_source->setZero(g.cells());
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell(i, j);
            double diag = 0.0;
            auto link = [&](int nb, double a) {
                t.emplace_back(c, nb, -a);
                diag += a;
            };
            auto side = [&](int s) {
                diag += side_coef[s];
                if (boundary_source) (*boundary_source)[c] += side_coef[s] * bc.value;
            };
            if (i > 0) link(g.cell(i - 1, j), ax); else side(0);
            if (i < g.nx - 1) link(g.cell(i + 1, j), ax); else side(1);
            if (j > 0) link(g.cell(i, j - 1), ay); else side(2);
            if (j < g.ny - 1) link(g.cell(i, j + 1), ay); else side(3);
            t.emplace_back(c, c, diag);
        }
    }
    SparseMatrix L(g.cells(), g.cells());
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

SparseMatrix identity_matrix(int n) {
    SparseMatrix I(n, n);
    I.setIdentity();
    return I;
}

SparseMatrix diagonal_matrix(const Vector& d) {
    SparseMatrix D(d.size(), d.size());
    Triplets t;
    t.reserve(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

}  // namespace chb
