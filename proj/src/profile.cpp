#include "gradridge/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace gradridge {

Profile::Profile(MultiIndexSet index_set, Eigen::VectorXd w)
    : basis_(Family::HermiteProbabilist, std::move(index_set)), w_(std::move(w)) {
    if (basis_.size() != w_.size())
        throw std::invalid_argument("Profile: coefficient size must match index set");
}

double Profile::value(const Eigen::VectorXd& z) const {
    return w_.dot(basis_.eval_values(z));
}

Eigen::VectorXd Profile::gradient(const Eigen::VectorXd& z) const {
    Eigen::VectorXd psi;
    Eigen::MatrixXd grad_psi;
    basis_.eval(z, psi, grad_psi);
    return grad_psi.transpose() * w_;
}

void Profile::value_and_gradient(const Eigen::VectorXd& z, double& value,
                                 Eigen::VectorXd& grad) const {
    Eigen::VectorXd psi;
    Eigen::MatrixXd grad_psi;
    basis_.eval(z, psi, grad_psi);
    value = w_.dot(psi);
    grad = grad_psi.transpose() * w_;
}

RegressionSystem::RegressionSystem(const FeatureMap& map, const Sample& sample,
                                   bool use_gradients, const ExecConfig& exec)
    : n_(sample.n()),
      d_(sample.dim()),
      m_(map.n_features()),
      use_gradients_(use_gradients),
      exec_(exec) {
    sample.validate();
    if (map.input_dim() != d_)
        throw std::invalid_argument("RegressionSystem: map/sample dimension mismatch");

    z_.resize(m_, n_);
    jac_t_.assign(static_cast<std::size_t>(n_), Eigen::MatrixXd());
    const int block = use_gradients_ ? d_ + 1 : 1;
    y_.resize(static_cast<Eigen::Index>(n_) * block);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_));

    for_indexed(static_cast<std::size_t>(n_), exec, [&](std::size_t i) {
        const Eigen::Index pt = static_cast<Eigen::Index>(i);
        Eigen::VectorXd z;
        map.eval_with_jacobian(sample.points.row(pt).transpose(), z, jac_t_[i]);
        z_.col(pt) = z;
        y_(pt * block) = scale * sample.values(pt);
        if (use_gradients_)
            y_.segment(pt * block + 1, d_) = scale * sample.gradients.row(pt).transpose();
    });

    table_ = UnivariateTable(std::vector<Family>(static_cast<std::size_t>(m_), Family::HermiteProbabilist),
                             z_.transpose(), 1, exec);
}

void RegressionSystem::reserve_degree(int degree) {
    if (degree > table_.max_degree())
        table_ = UnivariateTable(std::vector<Family>(static_cast<std::size_t>(m_), Family::HermiteProbabilist),
                                 z_.transpose(), degree, exec_);
}

Eigen::VectorXd RegressionSystem::column(const MultiIndex& alpha) const {
    const int block = use_gradients_ ? d_ + 1 : 1;
    Eigen::VectorXd col(static_cast<Eigen::Index>(n_) * block);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
    Eigen::VectorXd grad_psi(m_);
    for (int i = 0; i < n_; ++i) {
        const Eigen::Index row = static_cast<Eigen::Index>(i) * block;
        col(row) = scale * table_.phi(i, alpha);
        if (use_gradients_) {
            table_.grad_phi(i, alpha, grad_psi);
            col.segment(row + 1, d_) = scale * (jac_t_[static_cast<std::size_t>(i)] * grad_psi);
        }
    }
    return col;
}

void RegressionSystem::append_column(const MultiIndex& alpha, Eigen::MatrixXd& A) const {
    A.conservativeResize(rows(), A.cols() + 1);
    A.col(A.cols() - 1) = column(alpha);
}

std::vector<std::pair<MultiIndex, double>> RegressionSystem::correlation_scores(
    const Eigen::VectorXd& residual, const MultiIndexSet& candidates,
    const ExecConfig& exec) const {
    if (residual.size() != rows())
        throw std::invalid_argument("correlation_scores: residual size mismatch");
    std::vector<std::pair<MultiIndex, double>> scores(static_cast<std::size_t>(candidates.size()));
    for_indexed(static_cast<std::size_t>(candidates.size()), exec, [&](std::size_t q) {
        const MultiIndex& alpha = candidates[static_cast<int>(q)];
        scores[q] = {alpha, std::abs(column(alpha).dot(residual))};
    });
    return scores;
}

double gradient_enhanced_error(const Profile& profile, const FeatureMap& map,
                               const Sample& sample, const ExecConfig& exec) {
    sample.validate();
    if (profile.dim() != map.n_features())
        throw std::invalid_argument("gradient_enhanced_error: profile/map dimension mismatch");
    const int N = sample.n();
    double acc = 0.0;
    reduce_indexed(
        static_cast<std::size_t>(N), exec, acc, 0.0,
        [&](std::size_t i, double& a) {
            const Eigen::Index pt = static_cast<Eigen::Index>(i);
            Eigen::VectorXd z;
            Eigen::MatrixXd jac_t;
            map.eval_with_jacobian(sample.points.row(pt).transpose(), z, jac_t);
            double f;
            Eigen::VectorXd grad_f;
            profile.value_and_gradient(z, f, grad_f);
            const double dv = sample.values(pt) - f;
            const Eigen::VectorXd dg = sample.gradients.row(pt).transpose() - jac_t * grad_f;
            a += dv * dv + dg.squaredNorm();
        },
        [](double& a, const double& p) { a += p; });
    return acc / static_cast<double>(N);
}

double value_error(const Profile& profile, const FeatureMap& map, const Sample& sample,
                   const ExecConfig& exec) {
    sample.validate();
    if (profile.dim() != map.n_features())
        throw std::invalid_argument("value_error: profile/map dimension mismatch");
    const int N = sample.n();
    double acc = 0.0;
    reduce_indexed(
        static_cast<std::size_t>(N), exec, acc, 0.0,
        [&](std::size_t i, double& a) {
            const Eigen::Index pt = static_cast<Eigen::Index>(i);
            const double dv = sample.values(pt) - profile.value(map(sample.points.row(pt).transpose()));
            a += dv * dv;
        },
        [](double& a, const double& p) { a += p; });
    return acc / static_cast<double>(N);
}

GreedyProfileResult greedy_profile(const FeatureMap& map, const Sample& sample, int max_enrichments,
                                   double theta, bool use_gradients, const ExecConfig& exec) {
    if (max_enrichments < 0) throw std::invalid_argument("greedy_profile: negative iteration count");
    RegressionSystem system(map, sample, use_gradients, exec);
    const int m = map.n_features();

    MultiIndexSet active(m);
    active.insert(MultiIndex(static_cast<std::size_t>(m), 0));
    Eigen::MatrixXd A = system.column(active[0]);
    Eigen::VectorXd w = lstsq(A, system.target());

    GreedyProfileResult result;
    auto record = [&]() {
        ProfileIterate it;
        it.profile = Profile(active, w);
        it.train_error = (system.target() - A * w).squaredNorm();
        it.card = active.size();
        result.iterates.push_back(std::move(it));
    };
    record();

    for (int t = 0; t < max_enrichments; ++t) {
        const MultiIndexSet margin = active.reduced_margin();
        system.reserve_degree(active.max_degree() + 1);
        const Eigen::VectorXd residual = system.target() - A * w;
        const auto scores = system.correlation_scores(residual, margin, exec);
        const std::vector<MultiIndex> selected = bulk_select(scores, theta);
        for (const MultiIndex& alpha : selected) {
            active.insert(alpha);
            system.append_column(alpha, A);
        }
        w = lstsq(A, system.target());
        record();
    }
    return result;
}

}  // namespace gradridge
