#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gradridge/featuremap.hpp"

namespace gradridge {

/// Profile function f(z) = sum_l w_l Psi_{alpha_l}(z) over a multivariate
/// Hermite basis on R^m (constant term included).
class Profile {
public:
    Profile() = default;
    Profile(MultiIndexSet index_set, Eigen::VectorXd w);

    int dim() const { return basis_.dim(); }
    int size() const { return basis_.size(); }
    const ProductBasis& basis() const { return basis_; }
    const MultiIndexSet& index_set() const { return basis_.index_set(); }
    const Eigen::VectorXd& coefficients() const { return w_; }

    double value(const Eigen::VectorXd& z) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;
    void value_and_gradient(const Eigen::VectorXd& z, double& value, Eigen::VectorXd& grad) const;

private:
    ProductBasis basis_;
    Eigen::VectorXd w_;
};

/// Stacked least-squares system for the profile fit. With gradients, each
/// sample point contributes d+1 rows: the value row and the d chain-rule
/// gradient rows, all scaled by 1/sqrt(N), so that ||y - A w||^2 equals the
/// gradient-enhanced empirical mean squared error exactly.
class RegressionSystem {
public:
    RegressionSystem(const FeatureMap& map, const Sample& sample, bool use_gradients,
                     const ExecConfig& exec = {});

    int n_points() const { return n_; }
    int rows() const { return static_cast<int>(y_.size()); }
    bool use_gradients() const { return use_gradients_; }
    const Eigen::VectorXd& target() const { return y_; }
    const Eigen::MatrixXd& features() const { return z_; }  // m x N

    /// Ensures the cached Hermite table covers the given degree.
    void reserve_degree(int degree);

    /// Column for a candidate index (values + chain-rule gradient rows).
    Eigen::VectorXd column(const MultiIndex& alpha) const;

    void append_column(const MultiIndex& alpha, Eigen::MatrixXd& A) const;

    /// |A_alpha . residual| for each candidate.
    std::vector<std::pair<MultiIndex, double>> correlation_scores(
        const Eigen::VectorXd& residual, const MultiIndexSet& candidates,
        const ExecConfig& exec = {}) const;

private:
    int n_ = 0, d_ = 0, m_ = 0;
    bool use_gradients_ = true;
    Eigen::MatrixXd z_;                   // m x N
    std::vector<Eigen::MatrixXd> jac_t_;  // per point: d x m
    Eigen::VectorXd y_;
    UnivariateTable table_;  // Hermite values of the feature points
    ExecConfig exec_;
};

/// (1/N) sum [ (u - f(g(x)))^2 + || grad_u - grad(f o g) ||^2 ].
double gradient_enhanced_error(const Profile& profile, const FeatureMap& map,
                               const Sample& sample, const ExecConfig& exec = {});

/// (1/N) sum (u - f(g(x)))^2, the gradient-free mean squared error.
double value_error(const Profile& profile, const FeatureMap& map, const Sample& sample,
                   const ExecConfig& exec = {});

struct ProfileIterate {
    Profile profile;
    double train_error = 0.0;  // objective actually minimized by the fit
    int card = 0;
};

struct GreedyProfileResult {
    std::vector<ProfileIterate> iterates;  // index 0 = constant-term fit
};

/// Greedy profile construction: starting from the constant term, scores the
/// reduced margin by correlation with the residual, bulk-selects with
/// parameter theta, and refits by full least squares on the enlarged set.
GreedyProfileResult greedy_profile(const FeatureMap& map, const Sample& sample, int max_enrichments,
                                   double theta, bool use_gradients, const ExecConfig& exec = {});

}  // namespace gradridge
