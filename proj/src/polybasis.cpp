#include "gradridge/polybasis.hpp"

#include <cmath>
#include <stdexcept>

namespace gradridge {

std::string family_name(Family f) {
    switch (f) {
        case Family::HermiteProbabilist: return "hermite";
        case Family::LegendreUniform: return "legendre";
    }
    throw std::logic_error("family_name: unknown family");
}

Family family_from_name(const std::string& name) {
    if (name == "hermite") return Family::HermiteProbabilist;
    if (name == "legendre") return Family::LegendreUniform;
    throw std::invalid_argument("unknown polynomial family: " + name);
}

void eval_univariate(Family family, int max_degree, double x,
                     double* values, double* derivatives) {
    if (max_degree < 0) throw std::invalid_argument("eval_univariate: max_degree < 0");
    values[0] = 1.0;
    derivatives[0] = 0.0;
    if (max_degree == 0) return;

    if (family == Family::HermiteProbabilist) {
        // psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1); psi_n' = sqrt(n) psi_{n-1}.
        values[1] = x;
        derivatives[1] = 1.0;
        for (int n = 1; n < max_degree; ++n) {
            values[n + 1] = (x * values[n] - std::sqrt(static_cast<double>(n)) * values[n - 1]) /
                            std::sqrt(static_cast<double>(n + 1));
            derivatives[n + 1] = std::sqrt(static_cast<double>(n + 1)) * values[n];
        }
    } else {
        // Normalized Legendre l_n = sqrt(2n+1) P_n with P orthogonal for the
        // uniform density on [-1,1]. Derivatives via P'_{n+1} = (2n+1) P_n + P'_{n-1}.
        values[1] = std::sqrt(3.0) * x;
        derivatives[1] = std::sqrt(3.0);
        for (int n = 1; n < max_degree; ++n) {
            const double s_prev = std::sqrt(2.0 * n - 1.0);
            const double s_cur = std::sqrt(2.0 * n + 1.0);
            const double s_next = std::sqrt(2.0 * n + 3.0);
            values[n + 1] = s_next * (s_cur * x * values[n] - (n / s_prev) * values[n - 1]) /
                            (n + 1.0);
            derivatives[n + 1] = s_next * (s_cur * values[n] + derivatives[n - 1] / s_prev);
        }
    }
}

UnivariateTable::UnivariateTable(const std::vector<Family>& families,
                                 const Eigen::MatrixXd& points, int max_degree,
                                 const ExecConfig& exec)
    : n_(static_cast<int>(points.rows())),
      d_(static_cast<int>(points.cols())),
      max_degree_(max_degree) {
    if (static_cast<int>(families.size()) != d_)
        throw std::invalid_argument("UnivariateTable: families/points dimension mismatch");
    values_.assign(static_cast<std::size_t>(d_), Eigen::MatrixXd(max_degree + 1, n_));
    derivs_.assign(static_cast<std::size_t>(d_), Eigen::MatrixXd(max_degree + 1, n_));
    for_indexed(static_cast<std::size_t>(n_), exec, [&](std::size_t i) {
        for (int j = 0; j < d_; ++j) {
            eval_univariate(families[static_cast<std::size_t>(j)], max_degree,
                            points(static_cast<Eigen::Index>(i), j),
                            values_[static_cast<std::size_t>(j)].col(static_cast<Eigen::Index>(i)).data(),
                            derivs_[static_cast<std::size_t>(j)].col(static_cast<Eigen::Index>(i)).data());
        }
    });
}

double UnivariateTable::phi(int pt, const MultiIndex& alpha) const {
    double p = 1.0;
    for (int j = 0; j < d_; ++j) {
        const int a = alpha[static_cast<std::size_t>(j)];
        if (a > 0) p *= value(pt, j, a);
    }
    return p;
}

void UnivariateTable::grad_phi(int pt, const MultiIndex& alpha, Eigen::VectorXd& out) const {
    out.setZero(d_);
    for (int j = 0; j < d_; ++j) {
        const int a = alpha[static_cast<std::size_t>(j)];
        if (a == 0) continue;  // psi_0' == 0
        double p = deriv(pt, j, a);
        for (int k = 0; k < d_; ++k) {
            if (k == j) continue;
            const int ak = alpha[static_cast<std::size_t>(k)];
            if (ak > 0) p *= value(pt, k, ak);
        }
        out(j) = p;
    }
}

double UnivariateTable::dphi_dot(int pt, const MultiIndex& alpha, const double* vec) const {
    double acc = 0.0;
    for (int j = 0; j < d_; ++j) {
        const int a = alpha[static_cast<std::size_t>(j)];
        if (a == 0) continue;
        double p = deriv(pt, j, a);
        for (int k = 0; k < d_; ++k) {
            if (k == j) continue;
            const int ak = alpha[static_cast<std::size_t>(k)];
            if (ak > 0) p *= value(pt, k, ak);
        }
        acc += p * vec[j];
    }
    return acc;
}

ProductBasis::ProductBasis(std::vector<Family> families, MultiIndexSet index_set)
    : families_(std::move(families)), index_set_(std::move(index_set)) {
    if (static_cast<int>(families_.size()) != index_set_.dim())
        throw std::invalid_argument("ProductBasis: families/index set dimension mismatch");
}

ProductBasis::ProductBasis(Family family, MultiIndexSet index_set)
    : ProductBasis(std::vector<Family>(static_cast<std::size_t>(index_set.dim()), family),
                   std::move(index_set)) {}

void ProductBasis::eval(const Eigen::VectorXd& x, Eigen::VectorXd& phi,
                        Eigen::MatrixXd& grad_phi) const {
    const int d = dim();
    if (x.size() != d) throw std::invalid_argument("ProductBasis::eval: point dimension mismatch");
    const int md = index_set_.max_degree();
    Eigen::MatrixXd vals(md + 1, d), ders(md + 1, d);
    for (int j = 0; j < d; ++j)
        eval_univariate(families_[static_cast<std::size_t>(j)], md, x(j),
                        vals.col(j).data(), ders.col(j).data());

    const int K = size();
    phi.resize(K);
    grad_phi.setZero(K, d);
    for (int k = 0; k < K; ++k) {
        const MultiIndex& alpha = index_set_[k];
        double p = 1.0;
        for (int j = 0; j < d; ++j)
            if (alpha[static_cast<std::size_t>(j)] > 0) p *= vals(alpha[static_cast<std::size_t>(j)], j);
        phi(k) = p;
        for (int j = 0; j < d; ++j) {
            const int a = alpha[static_cast<std::size_t>(j)];
            if (a == 0) continue;
            double g = ders(a, j);
            for (int l = 0; l < d; ++l) {
                if (l == j) continue;
                const int al = alpha[static_cast<std::size_t>(l)];
                if (al > 0) g *= vals(al, l);
            }
            grad_phi(k, j) = g;
        }
    }
}

Eigen::VectorXd ProductBasis::eval_values(const Eigen::VectorXd& x) const {
    const int d = dim();
    if (x.size() != d) throw std::invalid_argument("ProductBasis::eval_values: point dimension mismatch");
    const int md = index_set_.max_degree();
    Eigen::MatrixXd vals(md + 1, d), ders(md + 1, d);
    for (int j = 0; j < d; ++j)
        eval_univariate(families_[static_cast<std::size_t>(j)], md, x(j),
                        vals.col(j).data(), ders.col(j).data());
    Eigen::VectorXd phi(size());
    for (int k = 0; k < size(); ++k) {
        const MultiIndex& alpha = index_set_[k];
        double p = 1.0;
        for (int j = 0; j < d; ++j)
            if (alpha[static_cast<std::size_t>(j)] > 0) p *= vals(alpha[static_cast<std::size_t>(j)], j);
        phi(k) = p;
    }
    return phi;
}

Eigen::MatrixXd empirical_covariance(const ProductBasis& basis, const Eigen::MatrixXd& points,
                                     const ExecConfig& exec) {
    const int N = static_cast<int>(points.rows());
    if (N < 1) throw std::invalid_argument("empirical_covariance: need at least one point");
    const int K = basis.size();
    UnivariateTable table(basis.families(), points, basis.index_set().max_degree(), exec);

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(K, K);
    Eigen::MatrixXd zero = cov;
    reduce_indexed(
        static_cast<std::size_t>(N), exec, cov, zero,
        [&](std::size_t i, Eigen::MatrixXd& acc) {
            Eigen::VectorXd phi(K);
            for (int k = 0; k < K; ++k) phi(k) = table.phi(static_cast<int>(i), basis.index_set()[k]);
            acc.selfadjointView<Eigen::Lower>().rankUpdate(phi);
        },
        [](Eigen::MatrixXd& acc, const Eigen::MatrixXd& p) { acc += p; });
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    cov /= static_cast<double>(N);
    return cov;
}

}  // namespace gradridge
