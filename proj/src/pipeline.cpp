#include "gradridge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gradridge/rng.hpp"

namespace gradridge {

void CvConfig::validate(int n_sample) const {
    if (m < 1) throw std::invalid_argument("CvConfig: m must be >= 1");
    if (folds < 2) throw std::invalid_argument("CvConfig: need at least 2 folds");
    if (n_sample < folds) throw std::invalid_argument("CvConfig: fewer sample points than folds");
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("CvConfig: theta must be in (0,1]");
    if (k_max < 0 || l_max < 0) throw std::invalid_argument("CvConfig: negative iteration limits");
}

Eigen::VectorXd SurrogateModel::gradient(const Eigen::VectorXd& z) const {
    Eigen::VectorXd features;
    Eigen::MatrixXd jac_t;
    feature_map.eval_with_jacobian(z, features, jac_t);
    return jac_t * profile.gradient(features);
}

Eigen::VectorXd SurrogateModel::standardize(const Eigen::VectorXd& x_physical) const {
    if (x_physical.size() != static_cast<Eigen::Index>(marginals.size()))
        throw std::invalid_argument("SurrogateModel::standardize: dimension mismatch");
    Eigen::VectorXd z(x_physical.size());
    for (Eigen::Index j = 0; j < z.size(); ++j)
        z(j) = marginals[static_cast<std::size_t>(j)].from_physical(x_physical(j));
    return z;
}

std::vector<std::vector<int>> partition_folds(int n, int folds, std::uint64_t seed) {
    if (folds < 1 || n < folds) throw std::invalid_argument("partition_folds: need n >= folds >= 1");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    const CounterRng rng{seed};
    for (int i = n - 1; i > 0; --i) {  // Fisher-Yates with counter draws
        const int j = static_cast<int>(rng.bits(static_cast<std::uint64_t>(i)) %
                                       static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }

    std::vector<std::vector<int>> out(static_cast<std::size_t>(folds));
    const int base = n / folds, extra = n % folds;
    int pos = 0;
    for (int f = 0; f < folds; ++f) {
        const int size = base + (f < extra ? 1 : 0);
        out[static_cast<std::size_t>(f)].assign(perm.begin() + pos, perm.begin() + pos + size);
        pos += size;
    }
    return out;
}

namespace {

std::vector<int> complement_of(const std::vector<int>& fold, int n) {
    std::vector<char> in_fold(static_cast<std::size_t>(n), 0);
    for (int i : fold) in_fold[static_cast<std::size_t>(i)] = 1;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n) - fold.size());
    for (int i = 0; i < n; ++i)
        if (!in_fold[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

/// Index of the smallest fold-mean value over the first `count` iterations.
int argmin_mean(const std::vector<std::vector<double>>& per_fold, int count,
                std::vector<double>* curve) {
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int j = 0; j < count; ++j) {
        double mean = 0.0;
        for (const auto& losses : per_fold) mean += losses[static_cast<std::size_t>(j)];
        mean /= static_cast<double>(per_fold.size());
        if (curve) curve->push_back(mean);
        if (mean < best_val) {
            best_val = mean;
            best = j;
        }
    }
    return best;
}

constexpr double kNoTest = std::numeric_limits<double>::quiet_NaN();

}  // namespace

SurrogateModel cv_train(const Sample& sample, const CvConfig& config,
                        const std::vector<Marginal>& marginals_in,
                        std::vector<TraceRow>* trace, const ExecConfig& exec) {
    sample.validate();
    config.validate(sample.n());
    const int n = sample.n();
    const int d = sample.dim();

    std::vector<Marginal> marginals =
        marginals_in.empty() ? standard_normal_marginals(d) : marginals_in;
    if (static_cast<int>(marginals.size()) != d)
        throw std::invalid_argument("cv_train: marginals/sample dimension mismatch");

    const auto folds = partition_folds(n, config.folds, config.seed);
    auto emit = [&](TraceRow row) {
        if (trace) trace->push_back(std::move(row));
    };

    GreedyFeatureOptions feature_opts;
    feature_opts.m = config.m;
    feature_opts.max_enrichments = config.k_max;
    feature_opts.theta = config.theta;
    feature_opts.families = reference_families(marginals);
    feature_opts.inner = config.inner;

    // Feature stage: per-fold runs monitored by the alignment loss on the
    // held-out rows, then a whole-sample rerun for the selected iteration.
    std::vector<std::vector<double>> fold_losses(static_cast<std::size_t>(config.folds));
    int common = config.k_max + 1;
    for (int f = 0; f < config.folds; ++f) {
        const Sample train = sample.subset(complement_of(folds[static_cast<std::size_t>(f)], n));
        const Sample test = sample.subset(folds[static_cast<std::size_t>(f)]);
        GreedyFeatureOptions opts = feature_opts;
        opts.seed = derive_seed(config.seed, static_cast<std::uint64_t>(f));
        const GreedyFeatureResult result = greedy_feature_map(train, opts, exec);
        auto& losses = fold_losses[static_cast<std::size_t>(f)];
        for (std::size_t j = 0; j < result.iterates.size(); ++j) {
            const FeatureIterate& it = result.iterates[j];
            losses.push_back(alignment_loss(it.map, test, exec));
            emit({"feature", f, static_cast<int>(j), it.card, it.train_loss, losses.back()});
        }
        common = std::min(common, static_cast<int>(result.iterates.size()));
    }

    SurrogateModel model;
    model.marginals = marginals;
    const int k_star = argmin_mean(fold_losses, common, &model.meta.feature_cv_curve);

    GreedyFeatureOptions final_opts = feature_opts;
    final_opts.max_enrichments = k_star;
    final_opts.seed = derive_seed(config.seed, static_cast<std::uint64_t>(config.folds));
    const GreedyFeatureResult final_feature = greedy_feature_map(sample, final_opts, exec);
    for (std::size_t j = 0; j < final_feature.iterates.size(); ++j) {
        const FeatureIterate& it = final_feature.iterates[j];
        emit({"feature", -1, static_cast<int>(j), it.card, it.train_loss, kNoTest});
    }
    model.feature_map = final_feature.iterates.back().map;

    // Profile stage, monitored per configuration.
    auto monitor_error = [&](const Profile& profile, const Sample& data) {
        return config.monitor == CvConfig::Monitor::ValueError
                   ? value_error(profile, model.feature_map, data, exec)
                   : gradient_enhanced_error(profile, model.feature_map, data, exec);
    };

    std::vector<std::vector<double>> profile_losses(static_cast<std::size_t>(config.folds));
    int profile_common = config.l_max + 1;
    for (int f = 0; f < config.folds; ++f) {
        const Sample train = sample.subset(complement_of(folds[static_cast<std::size_t>(f)], n));
        const Sample test = sample.subset(folds[static_cast<std::size_t>(f)]);
        const GreedyProfileResult result = greedy_profile(model.feature_map, train, config.l_max,
                                                          config.theta, config.use_gradients, exec);
        auto& losses = profile_losses[static_cast<std::size_t>(f)];
        for (std::size_t j = 0; j < result.iterates.size(); ++j) {
            const ProfileIterate& it = result.iterates[j];
            losses.push_back(monitor_error(it.profile, test));
            emit({"profile", f, static_cast<int>(j), it.card, it.train_error, losses.back()});
        }
        profile_common = std::min(profile_common, static_cast<int>(result.iterates.size()));
    }

    const int l_star = argmin_mean(profile_losses, profile_common, &model.meta.profile_cv_curve);
    const GreedyProfileResult final_profile = greedy_profile(
        model.feature_map, sample, l_star, config.theta, config.use_gradients, exec);
    for (std::size_t j = 0; j < final_profile.iterates.size(); ++j) {
        const ProfileIterate& it = final_profile.iterates[j];
        emit({"profile", -1, static_cast<int>(j), it.card, it.train_error, kNoTest});
    }
    model.profile = final_profile.iterates.back().profile;

    model.meta.n = n;
    model.meta.m = config.m;
    model.meta.k_star = k_star;
    model.meta.l_star = l_star;
    model.meta.theta = config.theta;
    model.meta.folds = config.folds;
    model.meta.seed = config.seed;
    model.meta.use_gradients = config.use_gradients;
    model.meta.monitor = config.monitor == CvConfig::Monitor::ValueError ? "value" : "gradient";
    model.meta.rng = CounterRng::algorithm;
    return model;
}

Metrics evaluate(const SurrogateModel& model, const Sample& validation, const ExecConfig& exec) {
    validation.validate();
    if (validation.dim() != model.input_dim())
        throw std::invalid_argument("evaluate: model/sample dimension mismatch");
    const int n = validation.n();

    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    const Eigen::Vector2d zero = acc;
    reduce_indexed(
        static_cast<std::size_t>(n), exec, acc, zero,
        [&](std::size_t i, Eigen::Vector2d& a) {
            const Eigen::Index pt = static_cast<Eigen::Index>(i);
            const Eigen::VectorXd x = validation.points.row(pt).transpose();
            Eigen::VectorXd features;
            Eigen::MatrixXd jac_t;
            model.feature_map.eval_with_jacobian(x, features, jac_t);
            double f;
            Eigen::VectorXd grad_f;
            model.profile.value_and_gradient(features, f, grad_f);
            const double dv = validation.values(pt) - f;
            a(0) += dv * dv;
            a(1) += (validation.gradients.row(pt).transpose() - jac_t * grad_f).squaredNorm();
        },
        [](Eigen::Vector2d& a, const Eigen::Vector2d& p) { a += p; });

    Metrics metrics;
    metrics.n = n;
    metrics.mse = acc(0) / n;
    metrics.gradient_mse = acc(1) / n;
    metrics.alignment = alignment_loss(model.feature_map, validation, exec);
    return metrics;
}

}  // namespace gradridge
