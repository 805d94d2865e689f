#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradridge/marginals.hpp"
#include "gradridge/profile.hpp"

namespace gradridge {

struct CvConfig {
    int m = 1;
    int k_max = 60;   // feature enrichment iterations
    int l_max = 200;  // profile enrichment iterations
    double theta = 0.3;
    int folds = 5;
    std::uint64_t seed = 0;
    bool use_gradients = true;

    enum class Monitor { ValueError, GradientError };
    Monitor monitor = Monitor::ValueError;

    RayleighMaxOptions inner;  // quasi-Newton settings for the feature fits

    void validate(int n_sample) const;
};

struct TraceRow {
    std::string phase;  // "feature" or "profile"
    int fold = 0;       // -1 for the final whole-sample run
    int iteration = 0;
    int card = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;  // NaN when there is no test split
};

/// Serializable surrogate bundle implementing f(g(.)) and its gradient in
/// reference (standardized) coordinates.
struct SurrogateModel {
    std::vector<Marginal> marginals;
    FeatureMap feature_map;
    Profile profile;

    struct Meta {
        int n = 0;
        int m = 0;
        int k_star = 0;
        int l_star = 0;
        double theta = 0.3;
        int folds = 5;
        std::uint64_t seed = 0;
        bool use_gradients = true;
        std::string monitor = "value";
        std::string rng = "splitmix64-counter-v1";
        std::vector<double> feature_cv_curve;  // fold-mean test loss per iteration
        std::vector<double> profile_cv_curve;
    } meta;

    int input_dim() const { return feature_map.input_dim(); }

    double predict(const Eigen::VectorXd& z) const { return profile.value(feature_map(z)); }
    Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;

    /// Convenience for callers holding physical coordinates.
    Eigen::VectorXd standardize(const Eigen::VectorXd& x_physical) const;
};

/// Seeded shuffle followed by a contiguous split into `folds` disjoint index
/// sets whose sizes differ by at most one.
std::vector<std::vector<int>> partition_folds(int n, int folds, std::uint64_t seed);

/// Cross-validated training: per-fold greedy feature runs select the
/// feature iteration count, the map is retrained on the full sample, then
/// the same scheme selects the profile iteration count. The same sample
/// trains both stages.
SurrogateModel cv_train(const Sample& sample, const CvConfig& config,
                        const std::vector<Marginal>& marginals = {},
                        std::vector<TraceRow>* trace = nullptr, const ExecConfig& exec = {});

struct Metrics {
    double mse = 0.0;
    double alignment = 0.0;  // emitted as "j_hat" on the wire
    double gradient_mse = 0.0;
    int n = 0;
};

Metrics evaluate(const SurrogateModel& model, const Sample& validation,
                 const ExecConfig& exec = {});

}  // namespace gradridge
