#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gradridge/multiindex.hpp"
#include "gradridge/parallel.hpp"

namespace gradridge {

/// Univariate families orthonormal with respect to a probability measure:
/// probabilists' Hermite (standard normal) and Legendre (uniform on [-1,1]).
/// Both have psi_0 == 1 and deg(psi_i) == i.
enum class Family { HermiteProbabilist, LegendreUniform };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Evaluates psi_0..psi_max_degree and their derivatives at x by the
/// normalized three-term recurrences. values/derivatives must have room
/// for max_degree+1 entries.
void eval_univariate(Family family, int max_degree, double x,
                     double* values, double* derivatives);

/// Cached univariate evaluations for a fixed point set, one block per
/// dimension, up to a fixed degree. Built once per enrichment iteration so
/// margin scoring can probe many candidate indices against the same points.
class UnivariateTable {
public:
    UnivariateTable() = default;
    UnivariateTable(const std::vector<Family>& families,
                    const Eigen::MatrixXd& points,  // N x d
                    int max_degree, const ExecConfig& exec = {});

    int n_points() const { return n_; }
    int dim() const { return d_; }
    int max_degree() const { return max_degree_; }

    double value(int pt, int dim, int deg) const {
        return values_[static_cast<std::size_t>(dim)](deg, pt);
    }
    double deriv(int pt, int dim, int deg) const {
        return derivs_[static_cast<std::size_t>(dim)](deg, pt);
    }

    /// Phi_alpha(x_pt), the product over dimensions.
    double phi(int pt, const MultiIndex& alpha) const;

    /// Writes the full d-vector grad Phi_alpha(x_pt) into out.
    void grad_phi(int pt, const MultiIndex& alpha, Eigen::VectorXd& out) const;

    /// grad Phi_alpha(x_pt) . vec, without materializing the gradient.
    double dphi_dot(int pt, const MultiIndex& alpha, const double* vec) const;

private:
    int n_ = 0, d_ = 0, max_degree_ = 0;
    std::vector<Eigen::MatrixXd> values_;  // per dim: (max_degree+1) x N
    std::vector<Eigen::MatrixXd> derivs_;
};

/// Tensor-product polynomial basis: one family per input dimension and a
/// multi-index set. If the zero index is excluded every member integrates
/// to zero against the product reference measure.
class ProductBasis {
public:
    ProductBasis() = default;
    ProductBasis(std::vector<Family> families, MultiIndexSet index_set);

    /// All dimensions share one family.
    ProductBasis(Family family, MultiIndexSet index_set);

    int dim() const { return static_cast<int>(families_.size()); }
    int size() const { return index_set_.size(); }
    const std::vector<Family>& families() const { return families_; }
    const MultiIndexSet& index_set() const { return index_set_; }

    /// phi[k] = Phi_{alpha_k}(x); grad_phi(k, nu) = d Phi_{alpha_k} / d x_nu.
    void eval(const Eigen::VectorXd& x, Eigen::VectorXd& phi, Eigen::MatrixXd& grad_phi) const;

    Eigen::VectorXd eval_values(const Eigen::VectorXd& x) const;

private:
    std::vector<Family> families_;
    MultiIndexSet index_set_;
};

/// Sample covariance (1/N) Phi^T Phi of the basis over the given points.
/// Uses the analytic zero mean of a basis that excludes the constant term;
/// no empirical centering is applied.
Eigen::MatrixXd empirical_covariance(const ProductBasis& basis, const Eigen::MatrixXd& points,
                                     const ExecConfig& exec = {});

}  // namespace gradridge
