#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace raceline {

struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    int dim() const { return static_cast<int>(lower.size()); }
    void validate() const;  // throws std::invalid_argument
    Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
    bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

struct OptimizerConfig {
    int memory = 10;        // history pairs
    int max_iters = 200;
    double grad_tol = 1e-6; // infinity norm of the projected gradient
    double f_tol = 1e-10;   // relative decrease below which we stop

    void validate() const;
};

enum class OptStatus { converged, max_iters, degenerate };

struct OptResult {
    Eigen::VectorXd x;
    double f = 0.0;
    OptStatus status = OptStatus::degenerate;
    int iterations = 0;
    int evaluations = 0;
};

// Returns the objective value and fills `grad` (same dimension as x).
using GradObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

// Limited-memory BFGS with gradient projection onto the box and an Armijo
// backtracking line search (c1 = 1e-4). Every iterate stays inside the box.
// Throws NumericalError when the objective returns a non-finite value or
// gradient, with the offending point in the message.
OptResult minimize(const GradObjective& objective, const Box& box,
                   const Eigen::VectorXd& x0, const OptimizerConfig& config = {});

// Best of `n_starts` independent minimize runs from stratified starts inside
// the box; deterministic given `seed`. A start that raises NumericalError is
// skipped unless every start fails.
OptResult multistart_minimize(const GradObjective& objective, const Box& box,
                              int n_starts, std::uint64_t seed,
                              const OptimizerConfig& config = {});

}  // namespace raceline
