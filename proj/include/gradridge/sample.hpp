#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gradridge {

/// Training data: N points in R^d with model values and full gradients.
struct Sample {
    Eigen::MatrixXd points;     // N x d
    Eigen::VectorXd values;     // N
    Eigen::MatrixXd gradients;  // N x d

    int n() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }

    /// Throws on inconsistent shapes or non-finite entries.
    void validate() const;

    /// Copy of the listed rows (views are not enough here: subsets are
    /// handed to training code that must not see the remaining rows).
    Sample subset(const std::vector<int>& rows) const;
};

}  // namespace gradridge
