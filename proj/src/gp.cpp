#include "raceline/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "raceline/errors.hpp"

namespace raceline {

namespace {

// Escalating-jitter Cholesky. First attempt is bare; on failure the ladder
// 1e-8, 1e-7, ..., 1e-2 is added to the diagonal.
std::pair<Eigen::MatrixXd, double> robust_cholesky(const Eigen::MatrixXd& A) {
    double jitter = 0.0;
    for (;;) {
        Eigen::MatrixXd M = A;
        if (jitter > 0.0) {
            M.diagonal().array() += jitter;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd L = llt.matrixL();
            if ((L.diagonal().array() > 0.0).all() && L.allFinite()) {
                return {L, jitter};
            }
        }
        if (jitter == 0.0) {
            jitter = 1e-8;
        } else if (jitter < 1e-2) {
            jitter *= 10.0;
        } else {
            std::ostringstream oss;
            oss << "fit_gp: Cholesky failed after jitter escalation to " << jitter
                << " (n=" << A.rows() << ", diag min=" << A.diagonal().minCoeff()
                << ", diag max=" << A.diagonal().maxCoeff() << ")";
            throw NumericalError(oss.str());
        }
    }
}

void check_query(const GpModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.dim()) {
        throw std::invalid_argument("gp query: expected dimension " +
                                    std::to_string(model.dim()) + ", got " +
                                    std::to_string(x.size()));
    }
}

}  // namespace

GpModel fit_gp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const KernelParams& kernel, double prior_mean_raw) {
    kernel.validate();
    if (X.rows() < 1 || X.rows() != y.size()) {
        throw std::invalid_argument("fit_gp: need n >= 1 inputs matching targets");
    }
    if (X.cols() != kernel.length_scales.size()) {
        throw std::invalid_argument("fit_gp: input dimension does not match length scales");
    }

    GpModel model;
    model.inputs = X;
    model.targets_raw = y;
    model.kernel = kernel;

    const Eigen::Index n = y.size();
    model.target_mean = y.mean();
    double std_dev = 1.0;
    if (n >= 2) {
        std_dev = std::sqrt((y.array() - model.target_mean).square().sum() /
                            static_cast<double>(n - 1));
        if (std_dev == 0.0 || !std::isfinite(std_dev)) {
            std_dev = 1.0;
        }
    }
    model.target_std = std_dev;
    model.prior_mean = (prior_mean_raw - model.target_mean) / model.target_std;

    Eigen::MatrixXd K = gram_matrix(X, kernel);
    K.diagonal().array() += kernel.noise_variance;
    auto [L, jitter] = robust_cholesky(K);
    model.chol = L;
    model.jitter = jitter;

    const Eigen::VectorXd z =
        (y.array() - model.target_mean).matrix() / model.target_std;
    const Eigen::VectorXd centered = z.array() - model.prior_mean;
    const Eigen::VectorXd v = L.triangularView<Eigen::Lower>().solve(centered);
    model.alpha = L.triangularView<Eigen::Lower>().adjoint().solve(v);
    if (!model.alpha.allFinite()) {
        throw NumericalError("fit_gp: non-finite weights after solve");
    }
    return model;
}

Posterior posterior(const GpModel& model, const Eigen::VectorXd& x) {
    check_query(model, x);
    const Eigen::VectorXd ks = cross_covariance(model.inputs, x, model.kernel);

    const double mean_std = model.prior_mean + ks.dot(model.alpha);
    const Eigen::VectorXd v = model.chol.triangularView<Eigen::Lower>().solve(ks);
    double var = model.kernel.signal_variance - v.squaredNorm();
    var = std::clamp(var, 0.0, model.kernel.signal_variance);

    Posterior post;
    post.mean = model.target_mean + model.target_std * mean_std;
    post.std = model.target_std * std::sqrt(var);
    return post;
}

PosteriorGradient posterior_gradient(const GpModel& model, const Eigen::VectorXd& x) {
    check_query(model, x);
    const Eigen::Index n = model.size();
    const Eigen::Index k = model.dim();

    // Rows of J are d k(x, X_i) / dx.
    Eigen::MatrixXd J(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        J.row(i) = matern52_grad(x, model.inputs.row(i).transpose(), model.kernel).transpose();
    }

    PosteriorGradient grad;
    grad.dmean = model.target_std * (J.transpose() * model.alpha);

    const Eigen::VectorXd ks = cross_covariance(model.inputs, x, model.kernel);
    const Eigen::VectorXd v = model.chol.triangularView<Eigen::Lower>().solve(ks);
    const Eigen::VectorXd beta =
        model.chol.triangularView<Eigen::Lower>().adjoint().solve(v);
    const double var = std::max(model.kernel.signal_variance - v.squaredNorm(), 0.0);
    const double sigma = std::sqrt(var);

    if (sigma < 1e-12) {
        grad.dstd = Eigen::VectorXd::Zero(k);
        grad.degenerate_std = true;
    } else {
        // d sigma / dx = -(J^T beta) / sigma
        grad.dstd = model.target_std * (-(J.transpose() * beta) / sigma);
    }
    return grad;
}

}  // namespace raceline
