#pragma once

#include <Eigen/Dense>

namespace raceline {

// Matern nu=5/2 covariance with one length scale per input dimension.
// Length scales are in epoch units; variances apply to standardized targets.
struct KernelParams {
    Eigen::VectorXd length_scales;
    double signal_variance = 1.0;
    double noise_variance = 0.01;

    int dim() const { return static_cast<int>(length_scales.size()); }
    void validate() const;  // throws std::invalid_argument
};

// k(a, b) = signal_variance * (1 + sqrt(5) r + 5 r^2 / 3) * exp(-sqrt(5) r)
// with r the length-scale-weighted Euclidean distance between a and b.
double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                const KernelParams& params);

// Gradient of matern52(x, c, params) with respect to x. Smooth everywhere,
// including r = 0 (the r in the chain rule cancels analytically).
Eigen::VectorXd matern52_grad(const Eigen::VectorXd& x, const Eigen::VectorXd& c,
                              const KernelParams& params);

// Gram matrix K with K(i,j) = k(row_i, row_j); no noise on the diagonal.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const KernelParams& params);

// Cross-covariance vector k(x, X_i) for all rows of X.
Eigen::VectorXd cross_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& x,
                                 const KernelParams& params);

}  // namespace raceline
