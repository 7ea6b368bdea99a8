#pragma once

#include <Eigen/Dense>

#include "raceline/kernel.hpp"

namespace raceline {

// Fitted Gaussian process with a constant prior mean and fixed kernel
// hyperparameters. Immutable after fit_gp; safe to share across threads.
struct GpModel {
    Eigen::MatrixXd inputs;       // n x k, raw epoch units
    Eigen::VectorXd targets_raw;  // n observed objective values, reward units
    double target_mean = 0.0;     // standardization constants
    double target_std = 1.0;
    Eigen::MatrixXd chol;         // lower-triangular factor of K + (noise + jitter) I
    Eigen::VectorXd alpha;        // (K + noise I)^{-1} (z - prior_mean)
    KernelParams kernel;
    double prior_mean = 0.0;      // standardized units
    double jitter = 0.0;          // diagonal jitter needed for factorization, 0 if none

    int size() const { return static_cast<int>(inputs.rows()); }
    int dim() const { return static_cast<int>(inputs.cols()); }
};

struct Posterior {
    double mean = 0.0;  // raw reward units
    double std = 0.0;   // raw reward units, >= 0
};

struct PosteriorGradient {
    Eigen::VectorXd dmean;
    Eigen::VectorXd dstd;
    // Set when the posterior std at x is below 1e-12 (standardized); sigma is
    // not differentiable at interpolated points, dstd is returned as zero.
    bool degenerate_std = false;
};

// Targets are standardized to zero mean / unit variance internally (std
// replaced by 1 when n < 2 or the sample std is 0). `prior_mean_raw` is the
// constant prior mean in raw reward units; predictions revert to it far from
// the data. Cholesky failures escalate diagonal jitter 1e-8 -> 1e-2 before
// raising NumericalError.
GpModel fit_gp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const KernelParams& kernel, double prior_mean_raw = 0.0);

Posterior posterior(const GpModel& model, const Eigen::VectorXd& x);

// Analytic gradients of the posterior mean and std with respect to x.
PosteriorGradient posterior_gradient(const GpModel& model, const Eigen::VectorXd& x);

}  // namespace raceline
