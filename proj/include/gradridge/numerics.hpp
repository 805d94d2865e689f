#pragma once

#include <Eigen/Dense>
#include <functional>

namespace gradridge {

/// Matrix-free symmetric operator. `apply` must be linear; `diagonal`,
/// when nonempty, is used for Jacobi preconditioning.
struct LinearOperator {
    Eigen::Index dimension = 0;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
    Eigen::VectorXd diagonal;  // optional
};

struct PcgResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Preconditioned conjugate gradient for symmetric positive semidefinite
/// operators. Stops when ||op(x) - rhs|| <= tol * ||rhs||. max_iter <= 0
/// selects the default 10*n. On non-convergence the best iterate seen is
/// returned with converged == false; the caller decides what to do.
PcgResult pcg_solve(const LinearOperator& op, const Eigen::VectorXd& rhs,
                    double tol = 1e-10, int max_iter = 0,
                    const Eigen::VectorXd* x0 = nullptr);

struct EigResult {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // orthonormal columns, matching order
};

/// Symmetric eigendecomposition with eigenvalues sorted descending.
EigResult sym_eig(const Eigen::MatrixXd& matrix, double symmetry_tol = 1e-12);

/// Minimum-norm least squares via complete orthogonal decomposition with
/// column pivoting; rank tolerance 1e-12 relative to the largest column norm.
Eigen::VectorXd lstsq(const Eigen::MatrixXd& design, const Eigen::VectorXd& target);

/// M^{-1/2} of a symmetric positive definite matrix via eigendecomposition.
/// Throws if an eigenvalue falls below 1e-14 * lambda_max (degenerate map).
Eigen::MatrixXd inv_sqrt_spd(const Eigen::MatrixXd& matrix);

}  // namespace gradridge
