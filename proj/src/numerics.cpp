#include "gradridge/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace gradridge {

PcgResult pcg_solve(const LinearOperator& op, const Eigen::VectorXd& rhs,
                    double tol, int max_iter, const Eigen::VectorXd* x0) {
    const Eigen::Index n = op.dimension;
    if (rhs.size() != n) throw std::invalid_argument("pcg_solve: rhs size mismatch");
    if (max_iter <= 0) max_iter = static_cast<int>(10 * n);

    const bool jacobi = op.diagonal.size() == n;
    const double rhs_norm = rhs.norm();

    PcgResult result;
    if (rhs_norm == 0.0) {
        result.x = Eigen::VectorXd::Zero(n);
        result.converged = true;
        return result;
    }

    Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r(n), z(n), p(n), q(n);
    op.apply(x, q);
    r = rhs - q;

    auto precondition = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
        if (jacobi) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = op.diagonal(i);
                out(i) = d > 0.0 ? in(i) / d : in(i);
            }
        } else {
            out = in;
        }
    };

    double best_res = r.norm();
    Eigen::VectorXd best_x = x;

    precondition(r, z);
    p = z;
    double rz = r.dot(z);

    int it = 0;
    while (it < max_iter && best_res > tol * rhs_norm) {
        op.apply(p, q);
        const double pq = p.dot(q);
        if (!(pq > 0.0)) break;  // loss of positive-definiteness or breakdown
        const double alpha = rz / pq;
        x += alpha * p;
        r -= alpha * q;
        ++it;

        const double res = r.norm();
        if (res < best_res) {
            best_res = res;
            best_x = x;
        }
        if (res <= tol * rhs_norm) break;

        precondition(r, z);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }

    result.x = best_x;
    result.iterations = it;
    result.relative_residual = best_res / rhs_norm;
    result.converged = best_res <= tol * rhs_norm;
    return result;
}

EigResult sym_eig(const Eigen::MatrixXd& matrix, double symmetry_tol) {
    if (matrix.rows() != matrix.cols()) throw std::invalid_argument("sym_eig: matrix not square");
    const double scale = matrix.cwiseAbs().maxCoeff();
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * std::max(1.0, scale))
        throw std::invalid_argument("sym_eig: matrix not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
    if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigendecomposition failed");

    const Eigen::Index n = matrix.rows();
    EigResult result;
    result.values.resize(n);
    result.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {  // Eigen sorts ascending
        result.values(i) = solver.eigenvalues()(n - 1 - i);
        result.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return result;
}

Eigen::VectorXd lstsq(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
    if (design.rows() != target.size()) throw std::invalid_argument("lstsq: row count mismatch");
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-12);  // rank cut relative to the largest pivot
    cod.compute(design);
    return cod.solve(target);
}

Eigen::MatrixXd inv_sqrt_spd(const Eigen::MatrixXd& matrix) {
    const EigResult eig = sym_eig(matrix, 1e-10);
    const double lambda_max = eig.values(0);
    if (!(lambda_max > 0.0)) throw std::runtime_error("inv_sqrt_spd: matrix not positive definite");
    const Eigen::Index n = matrix.rows();
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (eig.values(i) <= 1e-14 * lambda_max)
            throw std::runtime_error("inv_sqrt_spd: near-singular matrix (degenerate feature map)");
        inv_sqrt(i) = 1.0 / std::sqrt(eig.values(i));
    }
    return eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.transpose();
}

}  // namespace gradridge
