#include "gradridge/featuremap.hpp"

#include <cmath>
#include <stdexcept>

#include "gradridge/rng.hpp"

namespace gradridge {

void Sample::validate() const {
    if (points.rows() != values.size() || points.rows() != gradients.rows() ||
        points.cols() != gradients.cols())
        throw std::invalid_argument("Sample: inconsistent shapes");
    if (points.rows() < 1) throw std::invalid_argument("Sample: empty");
    if (!points.allFinite() || !values.allFinite() || !gradients.allFinite())
        throw std::invalid_argument("Sample: non-finite entries");
}

Sample Sample::subset(const std::vector<int>& rows) const {
    Sample out;
    const int d = dim();
    out.points.resize(static_cast<Eigen::Index>(rows.size()), d);
    out.values.resize(static_cast<Eigen::Index>(rows.size()));
    out.gradients.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.points.row(static_cast<Eigen::Index>(i)) = points.row(rows[i]);
        out.values(static_cast<Eigen::Index>(i)) = values(rows[i]);
        out.gradients.row(static_cast<Eigen::Index>(i)) = gradients.row(rows[i]);
    }
    return out;
}

FeatureMap::FeatureMap(ProductBasis basis, Eigen::MatrixXd coefficients)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
    if (basis_.size() != coefficients_.rows())
        throw std::invalid_argument("FeatureMap: coefficient rows must match basis size");
}

Eigen::VectorXd FeatureMap::operator()(const Eigen::VectorXd& x) const {
    return coefficients_.transpose() * basis_.eval_values(x);
}

Eigen::MatrixXd FeatureMap::jacobian(const Eigen::VectorXd& x) const {
    Eigen::VectorXd phi;
    Eigen::MatrixXd grad_phi;
    basis_.eval(x, phi, grad_phi);
    return coefficients_.transpose() * grad_phi;
}

void FeatureMap::eval_with_jacobian(const Eigen::VectorXd& x, Eigen::VectorXd& z,
                                    Eigen::MatrixXd& jac_t) const {
    Eigen::VectorXd phi;
    Eigen::MatrixXd grad_phi;
    basis_.eval(x, phi, grad_phi);
    z = coefficients_.transpose() * phi;
    jac_t = grad_phi.transpose() * coefficients_;  // d x m
}

PointOperators PointOperators::build(const ProductBasis& basis, const Sample& sample,
                                     const ExecConfig& exec) {
    UnivariateTable table(basis.families(), sample.points, basis.index_set().max_degree(), exec);
    return build(table, basis.index_set(), sample, exec);
}

PointOperators PointOperators::build(const UnivariateTable& table, const MultiIndexSet& index_set,
                                     const Sample& sample, const ExecConfig& exec) {
    sample.validate();
    PointOperators ops;
    ops.n_points = sample.n();
    ops.basis_size = index_set.size();
    ops.dim = sample.dim();
    const int N = ops.n_points, K = ops.basis_size, d = ops.dim;
    if (index_set.max_degree() > table.max_degree())
        throw std::invalid_argument("PointOperators: univariate table degree too small");

    ops.grad_phi.assign(static_cast<std::size_t>(N), Eigen::MatrixXd());
    ops.phi.resize(K, N);
    ops.v.resize(K, N);
    ops.grad_u = sample.gradients.transpose();
    ops.diag_b.resize(K, N);

    for_indexed(static_cast<std::size_t>(N), exec, [&](std::size_t i) {
        const int pt = static_cast<int>(i);
        Eigen::MatrixXd& gp = ops.grad_phi[i];
        gp.setZero(K, d);
        Eigen::VectorXd grad(d);
        for (int k = 0; k < K; ++k) {
            const MultiIndex& alpha = index_set[k];
            ops.phi(k, pt) = table.phi(pt, alpha);
            table.grad_phi(pt, alpha, grad);
            gp.row(k) = grad.transpose();
        }
        ops.v.col(pt) = gp * ops.grad_u.col(pt);
        ops.diag_b.col(pt) = gp.rowwise().squaredNorm();
    });
    ops.mean_grad_sq = ops.grad_u.squaredNorm() / static_cast<double>(N);
    return ops;
}

Eigen::MatrixXd PointOperators::covariance() const {
    return (phi * phi.transpose()) / static_cast<double>(n_points);
}

namespace {

// Ridge used before inverting the m x m feature Gram matrix; degenerate
// Jacobians occur at isolated points (e.g. the origin for pure quadratics).
double gram_ridge(const Eigen::MatrixXd& W) {
    const double tr = W.trace();
    return tr > 0.0 ? 1e-12 * tr / static_cast<double>(W.rows()) : 1e-12;
}

}  // namespace

RayleighState RayleighState::build(const Eigen::MatrixXd& G, const PointOperators& ops,
                                   const ExecConfig& exec) {
    const int N = ops.n_points;
    const int m = static_cast<int>(G.cols());
    if (G.rows() != ops.basis_size)
        throw std::invalid_argument("RayleighState: G rows must match basis size");

    RayleighState state;
    state.m = m;
    state.a.resize(m, N);
    state.c.resize(m, N);
    state.residual.resize(ops.dim, N);
    state.gram.assign(static_cast<std::size_t>(N), Eigen::LLT<Eigen::MatrixXd>());
    std::vector<char> bad(static_cast<std::size_t>(N), 0);

    for_indexed(static_cast<std::size_t>(N), exec, [&](std::size_t i) {
        const int pt = static_cast<int>(i);
        const Eigen::MatrixXd jac_t = ops.grad_phi[i].transpose() * G;  // d x m
        Eigen::MatrixXd W = jac_t.transpose() * jac_t;
        W.diagonal().array() += gram_ridge(W);
        state.gram[i].compute(W);
        if (state.gram[i].info() != Eigen::Success) {
            bad[i] = 1;
            state.a.col(pt).setZero();
            state.c.col(pt).setZero();
            state.residual.col(pt).setZero();
            return;
        }
        state.a.col(pt) = G.transpose() * ops.v.col(pt);
        state.c.col(pt) = state.gram[i].solve(state.a.col(pt));
        state.residual.col(pt) = ops.grad_u.col(pt) - jac_t * state.c.col(pt);
    });

    for (int i = 0; i < N; ++i)
        if (bad[static_cast<std::size_t>(i)]) state.flagged.push_back(i);

    double r = 0.0;
    reduce_indexed(
        static_cast<std::size_t>(N), exec, r, 0.0,
        [&](std::size_t i, double& acc) {
            acc += state.a.col(static_cast<Eigen::Index>(i)).dot(state.c.col(static_cast<Eigen::Index>(i)));
        },
        [](double& acc, const double& p) { acc += p; });
    state.rayleigh = r / static_cast<double>(N);
    return state;
}

double mean_rayleigh(const Eigen::MatrixXd& G, const PointOperators& ops, const ExecConfig& exec) {
    return RayleighState::build(G, ops, exec).rayleigh;
}

double alignment_loss(const Eigen::MatrixXd& G, const PointOperators& ops, const ExecConfig& exec) {
    return std::max(0.0, ops.mean_grad_sq - mean_rayleigh(G, ops, exec));
}

double alignment_loss(const FeatureMap& map, const Sample& sample, const ExecConfig& exec) {
    const PointOperators ops = PointOperators::build(map.basis(), sample, exec);
    return alignment_loss(map.coefficients(), ops, exec);
}

Eigen::MatrixXd mean_rayleigh_gradient(const Eigen::MatrixXd& G, const PointOperators& ops,
                                       const ExecConfig& exec) {
    const RayleighState state = RayleighState::build(G, ops, exec);
    const int N = ops.n_points;
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(G.rows(), G.cols());
    const Eigen::MatrixXd zero = grad;
    reduce_indexed(
        static_cast<std::size_t>(N), exec, grad, zero,
        [&](std::size_t i, Eigen::MatrixXd& acc) {
            const Eigen::Index pt = static_cast<Eigen::Index>(i);
            acc.noalias() += (ops.grad_phi[i] * state.residual.col(pt)) * state.c.col(pt).transpose();
        },
        [](Eigen::MatrixXd& acc, const Eigen::MatrixXd& p) { acc += p; });
    return grad * (2.0 / static_cast<double>(N));
}

Eigen::VectorXd apply_rayleigh_numerator(const RayleighState& state, const PointOperators& ops,
                                         const Eigen::VectorXd& x, const ExecConfig& exec) {
    const int N = ops.n_points, K = ops.basis_size, m = state.m;
    if (x.size() != static_cast<Eigen::Index>(K) * m)
        throw std::invalid_argument("apply_rayleigh_numerator: vector size mismatch");
    const Eigen::Map<const Eigen::MatrixXd> X(x.data(), K, m);

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, m);
    const Eigen::MatrixXd zero = out;
    reduce_indexed(
        static_cast<std::size_t>(N), exec, out, zero,
        [&](std::size_t i, Eigen::MatrixXd& acc) {
            const Eigen::Index pt = static_cast<Eigen::Index>(i);
            const Eigen::VectorXd t = X.transpose() * ops.v.col(pt);
            acc.noalias() += ops.v.col(pt) * state.gram[i].solve(t).transpose();
        },
        [](Eigen::MatrixXd& acc, const Eigen::MatrixXd& p) { acc += p; });
    out /= static_cast<double>(N);
    return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
}

Eigen::VectorXd apply_rayleigh_metric(const RayleighState& state, const PointOperators& ops,
                                      const Eigen::VectorXd& x, const ExecConfig& exec) {
    const int N = ops.n_points, K = ops.basis_size, m = state.m;
    if (x.size() != static_cast<Eigen::Index>(K) * m)
        throw std::invalid_argument("apply_rayleigh_metric: vector size mismatch");
    const Eigen::Map<const Eigen::MatrixXd> X(x.data(), K, m);

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, m);
    const Eigen::MatrixXd zero = out;
    reduce_indexed(
        static_cast<std::size_t>(N), exec, out, zero,
        [&](std::size_t i, Eigen::MatrixXd& acc) {
            const Eigen::Index pt = static_cast<Eigen::Index>(i);
            const Eigen::VectorXd xc = X * state.c.col(pt);                    // K
            const Eigen::VectorXd w = ops.grad_phi[i].transpose() * xc;       // d
            acc.noalias() += (ops.grad_phi[i] * w) * state.c.col(pt).transpose();
        },
        [](Eigen::MatrixXd& acc, const Eigen::MatrixXd& p) { acc += p; });
    out /= static_cast<double>(N);
    return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
}

Eigen::VectorXd rayleigh_metric_diagonal(const RayleighState& state, const PointOperators& ops,
                                         const ExecConfig& exec) {
    const int N = ops.n_points, K = ops.basis_size, m = state.m;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K) * m);
    const Eigen::VectorXd zero = diag;
    reduce_indexed(
        static_cast<std::size_t>(N), exec, diag, zero,
        [&](std::size_t i, Eigen::VectorXd& acc) {
            const Eigen::Index pt = static_cast<Eigen::Index>(i);
            for (int j = 0; j < m; ++j) {
                const double cj = state.c(j, pt);
                acc.segment(static_cast<Eigen::Index>(j) * K, K) += (cj * cj) * ops.diag_b.col(pt);
            }
        },
        [](Eigen::VectorXd& acc, const Eigen::VectorXd& p) { acc += p; });
    return diag / static_cast<double>(N);
}

namespace {

Eigen::MatrixXd normalize_against(const Eigen::MatrixXd& G, const Eigen::MatrixXd& cov) {
    const Eigen::MatrixXd M = G.transpose() * cov * G;
    return G * inv_sqrt_spd(M);
}

}  // namespace

RayleighMaxResult maximize_mean_rayleigh(const PointOperators& ops, const Eigen::MatrixXd& cov,
                                         const Eigen::MatrixXd& G0, const RayleighMaxOptions& opts,
                                         const ExecConfig& exec) {
    const int K = ops.basis_size;
    const int m = static_cast<int>(G0.cols());
    if (G0.rows() != K) throw std::invalid_argument("maximize_mean_rayleigh: G0 rows mismatch");
    const int n = K * m;
    const int pcg_max = opts.pcg_max_iter > 0 ? opts.pcg_max_iter : 10 * n;

    RayleighMaxResult result;
    Eigen::MatrixXd G = normalize_against(G0, cov);

    for (int k = 0; k < opts.max_iter; ++k) {
        const RayleighState state = RayleighState::build(G, ops, exec);
        result.rayleigh_trace.push_back(state.rayleigh);

        const Eigen::Map<const Eigen::VectorXd> g_vec(G.data(), n);
        const Eigen::VectorXd b = apply_rayleigh_numerator(state, ops, g_vec, exec);
        if (b.norm() == 0.0) {  // vanishing gradients: every G is stationary
            result.iterations = k + 1;
            result.converged = true;
            result.final_stepsize = 0.0;
            break;
        }

        LinearOperator metric;
        metric.dimension = n;
        metric.diagonal = rayleigh_metric_diagonal(state, ops, exec);
        metric.apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
            out = apply_rayleigh_metric(state, ops, in, exec);
        };

        const Eigen::VectorXd warm = g_vec;
        const PcgResult sol = pcg_solve(metric, b, opts.pcg_tol, pcg_max, &warm);
        if (!sol.x.allFinite())
            throw std::runtime_error("maximize_mean_rayleigh: inner solve diverged");

        const Eigen::Map<const Eigen::MatrixXd> half(sol.x.data(), K, m);
        const Eigen::MatrixXd G_next = normalize_against(half, cov);

        result.final_stepsize = (G_next - G).norm();
        G = G_next;
        result.iterations = k + 1;
        if (result.final_stepsize < opts.eps) {
            result.converged = true;
            break;
        }
    }

    result.rayleigh_trace.push_back(mean_rayleigh(G, ops, exec));
    result.G = std::move(G);
    return result;
}

std::vector<std::pair<MultiIndex, double>> margin_scores(const RayleighState& state,
                                                         const PointOperators& ops,
                                                         const UnivariateTable& table,
                                                         const MultiIndexSet& margin,
                                                         const ExecConfig& exec) {
    const int N = ops.n_points;
    const int m = state.m;
    std::vector<std::pair<MultiIndex, double>> scores(static_cast<std::size_t>(margin.size()));
    for_indexed(static_cast<std::size_t>(margin.size()), exec, [&](std::size_t q) {
        const MultiIndex& alpha = margin[static_cast<int>(q)];
        Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < N; ++i) {
            const double rho = table.dphi_dot(i, alpha, state.residual.col(i).data());
            s += rho * state.c.col(i);
        }
        scores[q] = {alpha, 2.0 * s.norm() / static_cast<double>(N)};
    });
    return scores;
}

double margin_score(const FeatureMap& map, const Sample& sample, const MultiIndex& candidate,
                    const ExecConfig& exec) {
    const PointOperators ops = PointOperators::build(map.basis(), sample, exec);
    const RayleighState state = RayleighState::build(map.coefficients(), ops, exec);
    UnivariateTable table(map.basis().families(), sample.points,
                          std::max(map.basis().index_set().max_degree(), total_degree(candidate)),
                          exec);
    MultiIndexSet single(map.input_dim());
    single.insert(candidate);
    return margin_scores(state, ops, table, single, exec)[0].second;
}

GreedyFeatureResult greedy_feature_map(const Sample& sample, const GreedyFeatureOptions& opts,
                                       const ExecConfig& exec) {
    sample.validate();
    const int d = sample.dim();
    const int N = sample.n();
    if (opts.m < 1 || opts.m > d)
        throw std::invalid_argument("greedy_feature_map: need 1 <= m <= d");
    std::vector<Family> families = opts.families;
    if (families.empty())
        families.assign(static_cast<std::size_t>(d), Family::HermiteProbabilist);
    if (static_cast<int>(families.size()) != d)
        throw std::invalid_argument("greedy_feature_map: families/dimension mismatch");

    // The closure keeps the constant index so margins stay downward-closed;
    // the basis itself excludes it (mean-zero basis).
    MultiIndexSet closure = MultiIndexSet::total_degree_set(d, 1, 0);
    MultiIndexSet basis_set = MultiIndexSet::total_degree_set(d, 1, 1);

    UnivariateTable table(families, sample.points, closure.max_degree() + 1, exec);
    PointOperators ops = PointOperators::build(table, basis_set, sample, exec);
    Eigen::MatrixXd cov = ops.covariance();

    CounterRng rng{opts.seed};
    Eigen::MatrixXd G(basis_set.size(), opts.m);
    for (int k = 0; k < G.rows(); ++k)
        for (int j = 0; j < opts.m; ++j)
            G(k, j) = rng.normal(2 * static_cast<std::uint64_t>(k * opts.m + j));

    GreedyFeatureResult result;
    auto run_inner = [&](const Eigen::MatrixXd& G_init) {
        const RayleighMaxResult inner = maximize_mean_rayleigh(ops, cov, G_init, opts.inner, exec);
        G = inner.G;
        FeatureIterate iterate;
        iterate.map = FeatureMap(ProductBasis(families, basis_set), G);
        iterate.train_loss = std::max(0.0, ops.mean_grad_sq - inner.rayleigh_trace.back());
        iterate.card = basis_set.size();
        result.iterates.push_back(std::move(iterate));
    };
    run_inner(G);

    for (int t = 0; t < opts.max_enrichments; ++t) {
        if (basis_set.size() >= N) break;  // normalization covariance would be singular

        const MultiIndexSet margin = closure.reduced_margin();
        if (table.max_degree() < closure.max_degree() + 1)
            table = UnivariateTable(families, sample.points, closure.max_degree() + 1, exec);

        const RayleighState state = RayleighState::build(G, ops, exec);
        const auto scores = margin_scores(state, ops, table, margin, exec);
        std::vector<MultiIndex> selected = bulk_select(scores, opts.theta);

        // The normalization covariance has rank at most N; cap the batch
        // (it is sorted by decreasing score) so the basis stays below that.
        const std::size_t room = static_cast<std::size_t>(N - 1 - basis_set.size());
        if (selected.size() > room) selected.resize(room);
        if (selected.empty()) break;

        for (const MultiIndex& alpha : selected) {
            closure.insert(alpha);
            basis_set.insert(alpha);
        }
        if (table.max_degree() < closure.max_degree())
            table = UnivariateTable(families, sample.points, closure.max_degree() + 1, exec);
        ops = PointOperators::build(table, basis_set, sample, exec);
        cov = ops.covariance();

        Eigen::MatrixXd G_warm = Eigen::MatrixXd::Zero(basis_set.size(), opts.m);
        G_warm.topRows(G.rows()) = G;
        run_inner(G_warm);
    }
    return result;
}

}  // namespace gradridge
