#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gradridge/numerics.hpp"
#include "gradridge/polybasis.hpp"
#include "gradridge/sample.hpp"

namespace gradridge {

/// Polynomial feature map g(x) = G^T Phi(x) over a mean-zero basis (the
/// constant index is excluded from the index set). After training, G
/// satisfies G^T Cov(Phi) G = I_m on the training points.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(ProductBasis basis, Eigen::MatrixXd coefficients);

    int input_dim() const { return basis_.dim(); }
    int n_features() const { return static_cast<int>(coefficients_.cols()); }
    int basis_size() const { return basis_.size(); }

    const ProductBasis& basis() const { return basis_; }
    const Eigen::MatrixXd& coefficients() const { return coefficients_; }

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

    /// Jacobian of g at x, m x d.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

    /// Both at once; jac_t is d x m (the transposed Jacobian).
    void eval_with_jacobian(const Eigen::VectorXd& x, Eigen::VectorXd& z,
                            Eigen::MatrixXd& jac_t) const;

private:
    ProductBasis basis_;
    Eigen::MatrixXd coefficients_;  // K x m
};

/// Per-point factored quantities shared by every Rayleigh computation on a
/// fixed sample and basis: the basis Jacobian at each point, the K-vector
/// grad_Phi * grad_u, the diagonal of grad_Phi grad_Phi^T, and the basis
/// values (used for the normalization covariance).
struct PointOperators {
    int n_points = 0;
    int basis_size = 0;
    int dim = 0;
    std::vector<Eigen::MatrixXd> grad_phi;  // per point: K x d
    Eigen::MatrixXd phi;                    // K x N
    Eigen::MatrixXd v;                      // K x N, col i = grad_phi[i] * grad_u_i
    Eigen::MatrixXd grad_u;                 // d x N
    Eigen::MatrixXd diag_b;                 // K x N, col i = rowwise |grad_phi[i]|^2
    double mean_grad_sq = 0.0;              // (1/N) sum ||grad_u||^2

    static PointOperators build(const ProductBasis& basis, const Sample& sample,
                                const ExecConfig& exec = {});
    static PointOperators build(const UnivariateTable& table, const MultiIndexSet& index_set,
                                const Sample& sample, const ExecConfig& exec = {});

    /// Normalization covariance (1/N) Phi Phi^T of the basis on the points.
    Eigen::MatrixXd covariance() const;
};

/// Per-point solves for a fixed coefficient matrix G: the ridge-regularized
/// Gram factorizations of the feature Jacobians, the projected coefficients
/// c_i, and the gradient components orthogonal to the Jacobian range.
struct RayleighState {
    int m = 0;
    Eigen::MatrixXd a;         // m x N
    Eigen::MatrixXd c;         // m x N
    Eigen::MatrixXd residual;  // d x N: grad_u - projection onto range(Jacobian^T)
    std::vector<Eigen::LLT<Eigen::MatrixXd>> gram;  // per point, regularized
    std::vector<int> flagged;  // points whose Gram factorization failed
    double rayleigh = 0.0;     // mean of a_i . c_i

    static RayleighState build(const Eigen::MatrixXd& G, const PointOperators& ops,
                               const ExecConfig& exec = {});
};

/// Sample mean of the generalized Rayleigh quotients trace((G^T A G)(G^T B G)^-1).
double mean_rayleigh(const Eigen::MatrixXd& G, const PointOperators& ops,
                     const ExecConfig& exec = {});

/// Mean squared norm of the gradient component outside range(Jacobian^T);
/// equals mean ||grad_u||^2 minus the mean Rayleigh quotient, clamped at 0.
double alignment_loss(const Eigen::MatrixXd& G, const PointOperators& ops,
                      const ExecConfig& exec = {});
double alignment_loss(const FeatureMap& map, const Sample& sample, const ExecConfig& exec = {});

/// Gradient of mean_rayleigh with respect to G (K x m).
Eigen::MatrixXd mean_rayleigh_gradient(const Eigen::MatrixXd& G, const PointOperators& ops,
                                       const ExecConfig& exec = {});

/// Implicit Km x Km operators of the quasi-Newton iteration. Neither is
/// ever materialized; only their action on a vector is computed.
Eigen::VectorXd apply_rayleigh_numerator(const RayleighState& state, const PointOperators& ops,
                                         const Eigen::VectorXd& x, const ExecConfig& exec = {});
Eigen::VectorXd apply_rayleigh_metric(const RayleighState& state, const PointOperators& ops,
                                      const Eigen::VectorXd& x, const ExecConfig& exec = {});

/// Exact diagonal of the metric operator, for Jacobi preconditioning.
Eigen::VectorXd rayleigh_metric_diagonal(const RayleighState& state, const PointOperators& ops,
                                         const ExecConfig& exec = {});

struct RayleighMaxOptions {
    double eps = 1e-9;     // stop when ||G_next - G||_F < eps
    int max_iter = 50;
    double pcg_tol = 1e-10;
    int pcg_max_iter = 0;  // 0 -> 10 * K * m
};

struct RayleighMaxResult {
    Eigen::MatrixXd G;
    std::vector<double> rayleigh_trace;  // value at each visited iterate
    int iterations = 0;
    bool converged = false;
    double final_stepsize = 0.0;
};

/// Quasi-Newton maximization of the mean Rayleigh quotient: each step
/// solves metric * x = numerator * G_vec with preconditioned CG, takes the
/// matricized solution, and renormalizes so that G^T cov G = I_m.
RayleighMaxResult maximize_mean_rayleigh(const PointOperators& ops, const Eigen::MatrixXd& cov,
                                         const Eigen::MatrixXd& G0, const RayleighMaxOptions& opts,
                                         const ExecConfig& exec = {});

/// Enrichment scores: for each candidate in the reduced margin, the norm of
/// the alignment-loss derivative with respect to a new coefficient row
/// appended for that candidate (evaluated at zero). The table must cover
/// the candidate degrees.
std::vector<std::pair<MultiIndex, double>> margin_scores(const RayleighState& state,
                                                         const PointOperators& ops,
                                                         const UnivariateTable& table,
                                                         const MultiIndexSet& margin,
                                                         const ExecConfig& exec = {});

/// Single-candidate convenience overload (builds the state internally).
double margin_score(const FeatureMap& map, const Sample& sample, const MultiIndex& candidate,
                    const ExecConfig& exec = {});

struct GreedyFeatureOptions {
    int m = 1;
    int max_enrichments = 60;
    double theta = 0.3;
    std::uint64_t seed = 0;
    std::vector<Family> families;  // empty -> all HermiteProbabilist
    RayleighMaxOptions inner;
};

struct FeatureIterate {
    FeatureMap map;
    double train_loss = 0.0;  // alignment loss on the training sample
    int card = 0;             // basis terms (constant excluded)
};

struct GreedyFeatureResult {
    std::vector<FeatureIterate> iterates;  // index 0 = trained degree-1 map
};

/// Greedy construction of the feature basis: starts from the degree-1
/// space, scores the reduced margin, bulk-selects with parameter theta,
/// and warm-starts the Rayleigh maximization with zero rows for the new
/// indices. Every intermediate map is returned for cross-validation.
GreedyFeatureResult greedy_feature_map(const Sample& sample, const GreedyFeatureOptions& opts,
                                       const ExecConfig& exec = {});

}  // namespace gradridge
