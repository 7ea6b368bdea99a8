#include "raceline/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace raceline {

namespace {
constexpr double kSqrt5 = 2.23606797749978969;

void check_dims(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                const KernelParams& params) {
    if (a.size() != b.size() || a.size() != params.length_scales.size()) {
        throw std::invalid_argument("matern52: dimension mismatch (a=" +
                                    std::to_string(a.size()) + ", b=" +
                                    std::to_string(b.size()) + ", length_scales=" +
                                    std::to_string(params.length_scales.size()) + ")");
    }
}

double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const KernelParams& params) {
    return ((a - b).array() / params.length_scales.array()).matrix().norm();
}
}  // namespace

void KernelParams::validate() const {
    if (length_scales.size() == 0 || (length_scales.array() <= 0.0).any()) {
        throw std::invalid_argument("KernelParams: length scales must be positive");
    }
    if (signal_variance <= 0.0) {
        throw std::invalid_argument("KernelParams: signal_variance must be positive");
    }
    if (noise_variance < 0.0) {
        throw std::invalid_argument("KernelParams: noise_variance must be non-negative");
    }
}

double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                const KernelParams& params) {
    check_dims(a, b, params);
    const double r = scaled_distance(a, b, params);
    const double z = kSqrt5 * r;
    return params.signal_variance * (1.0 + z + 5.0 * r * r / 3.0) * std::exp(-z);
}

Eigen::VectorXd matern52_grad(const Eigen::VectorXd& x, const Eigen::VectorXd& c,
                              const KernelParams& params) {
    check_dims(x, c, params);
    const double r = scaled_distance(x, c, params);
    // dk/dr = -sv * (5/3) r (1 + sqrt(5) r) exp(-sqrt(5) r) and
    // dr/dx_d = (x_d - c_d) / (l_d^2 r); the r factors cancel.
    const double w = -params.signal_variance * (5.0 / 3.0) * (1.0 + kSqrt5 * r) *
                     std::exp(-kSqrt5 * r);
    return w * ((x - c).array() / params.length_scales.array().square()).matrix();
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const KernelParams& params) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = params.signal_variance;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            K(i, j) = matern52(X.row(i).transpose(), X.row(j).transpose(), params);
            K(j, i) = K(i, j);
        }
    }
    return K;
}

Eigen::VectorXd cross_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& x,
                                 const KernelParams& params) {
    Eigen::VectorXd k(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        k(i) = matern52(X.row(i).transpose(), x, params);
    }
    return k;
}

}  // namespace raceline
