#include "raceline/boxopt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "raceline/errors.hpp"
#include "raceline/rng.hpp"

namespace raceline {

void Box::validate() const {
    if (lower.size() == 0 || lower.size() != upper.size()) {
        throw std::invalid_argument("Box: lower/upper dimension mismatch");
    }
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!(lower(i) < upper(i))) {
            throw std::invalid_argument("Box: lower[" + std::to_string(i) +
                                        "] must be < upper[" + std::to_string(i) + "]");
        }
    }
}

Eigen::VectorXd Box::clamp(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != lower.size()) return false;
    return ((x.array() >= lower.array() - tol) && (x.array() <= upper.array() + tol)).all();
}

void OptimizerConfig::validate() const {
    if (memory <= 0 || max_iters <= 0 || grad_tol <= 0.0 || f_tol <= 0.0) {
        throw std::invalid_argument("OptimizerConfig: all fields must be positive");
    }
}

namespace {

constexpr double kArmijoC1 = 1e-4;
constexpr int kMaxBacktracks = 60;

std::string format_point(const Eigen::VectorXd& x) {
    std::ostringstream oss;
    oss << "[";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        oss << (i ? ", " : "") << x(i);
    }
    oss << "]";
    return oss.str();
}

struct Pair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
};

// Standard two-loop recursion, returns -H * g.
Eigen::VectorXd lbfgs_direction(const std::deque<Pair>& history, const Eigen::VectorXd& g) {
    Eigen::VectorXd q = g;
    std::vector<double> a(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
        a[i] = history[i].rho * history[i].s.dot(q);
        q -= a[i] * history[i].y;
    }
    if (!history.empty()) {
        const Pair& last = history.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double b = history[i].rho * history[i].y.dot(q);
        q += (a[i] - b) * history[i].s;
    }
    return -q;
}

}  // namespace

OptResult minimize(const GradObjective& objective, const Box& box,
                   const Eigen::VectorXd& x0, const OptimizerConfig& config) {
    box.validate();
    config.validate();
    if (x0.size() != box.lower.size()) {
        throw std::invalid_argument("minimize: x0 dimension does not match box");
    }

    OptResult result;
    const Eigen::Index k = box.dim();
    const Eigen::VectorXd span = box.upper - box.lower;

    auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        grad.resize(k);
        const double f = objective(x, grad);
        ++result.evaluations;
        if (!std::isfinite(f) || !grad.allFinite()) {
            throw NumericalError("minimize: non-finite objective or gradient at x = " +
                                 format_point(x));
        }
        return f;
    };

    Eigen::VectorXd x = box.clamp(x0);
    Eigen::VectorXd g(k);
    double f = eval(x, g);

    std::deque<Pair> history;
    // Step length (in x units) for plain gradient iterations; grows while
    // full steps keep being accepted so flat regions are crossed quickly.
    const double max_sd_step = span.lpNorm<Eigen::Infinity>();
    double sd_step = 1e-2 * max_sd_step;

    auto projected_gradient = [&](const Eigen::VectorXd& xc, const Eigen::VectorXd& gc) {
        return (xc - box.clamp(xc - gc)).eval();
    };

    for (int iter = 1; iter <= config.max_iters; ++iter) {
        result.iterations = iter;

        const Eigen::VectorXd pg = projected_gradient(x, g);
        if (pg.lpNorm<Eigen::Infinity>() <= config.grad_tol) {
            result.status = OptStatus::converged;
            break;
        }

        // Variables pinned at a bound with the gradient pushing outward are
        // held fixed; the quasi-Newton step acts on the free subspace.
        Eigen::VectorXd g_free = g;
        for (Eigen::Index i = 0; i < k; ++i) {
            const double eps = 1e-12 * span(i);
            const bool at_lower = x(i) <= box.lower(i) + eps && g(i) > 0.0;
            const bool at_upper = x(i) >= box.upper(i) - eps && g(i) < 0.0;
            if (at_lower || at_upper) g_free(i) = 0.0;
        }

        bool gradient_mode = history.empty();
        Eigen::VectorXd d = lbfgs_direction(history, g_free);
        for (Eigen::Index i = 0; i < k; ++i) {
            if (g_free(i) == 0.0 && g(i) != 0.0) d(i) = 0.0;
        }
        if (d.dot(g) >= 0.0 || !d.allFinite()) {
            d = -g_free;  // quasi-Newton direction unusable, fall back to steepest descent
            gradient_mode = true;
        }
        const double d_norm = d.lpNorm<Eigen::Infinity>();
        if (d_norm == 0.0) {
            result.status = OptStatus::degenerate;
            break;
        }

        double t = gradient_mode ? sd_step / d_norm : 1.0;
        bool accepted = false;
        int backtracks = 0;
        Eigen::VectorXd x_new(k), g_new(k);
        double f_new = f;
        for (; backtracks < kMaxBacktracks; ++backtracks) {
            x_new = box.clamp(x + t * d);
            const Eigen::VectorXd step = x_new - x;
            if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
            f_new = eval(x_new, g_new);
            if (f_new <= f + kArmijoC1 * g.dot(step)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (gradient_mode && accepted) {
            sd_step = backtracks == 0 ? std::min(2.0 * t * d_norm, max_sd_step)
                                      : t * d_norm;
        }

        if (!accepted) {
            result.status = pg.lpNorm<Eigen::Infinity>() <= config.grad_tol
                                ? OptStatus::converged
                                : OptStatus::degenerate;
            break;
        }

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-10 * s.norm() * yv.norm()) {
            history.push_back({s, yv, 1.0 / sy});
            if (static_cast<int>(history.size()) > config.memory) history.pop_front();
        }

        const double decrease = f - f_new;
        x = x_new;
        g = g_new;
        f = f_new;

        if (decrease <= config.f_tol * std::max(1.0, std::abs(f))) {
            const Eigen::VectorXd pg_now = projected_gradient(x, g);
            result.status = pg_now.lpNorm<Eigen::Infinity>() <= config.grad_tol
                                ? OptStatus::converged
                                : OptStatus::degenerate;
            break;
        }
        result.status = OptStatus::max_iters;
    }

    result.x = x;
    result.f = f;
    return result;
}

OptResult multistart_minimize(const GradObjective& objective, const Box& box,
                              int n_starts, std::uint64_t seed,
                              const OptimizerConfig& config) {
    box.validate();
    if (n_starts < 1) {
        throw std::invalid_argument("multistart_minimize: n_starts must be >= 1");
    }
    const int k = box.dim();

    // Stratified (latin hypercube) starts: each dimension gets an independent
    // permutation of the strata.
    std::mt19937_64 rng = make_rng(seed, "multistart");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<int>> perms(k);
    for (int d = 0; d < k; ++d) {
        perms[d].resize(n_starts);
        std::iota(perms[d].begin(), perms[d].end(), 0);
        std::shuffle(perms[d].begin(), perms[d].end(), rng);
    }
    std::vector<Eigen::VectorXd> starts(n_starts, Eigen::VectorXd(k));
    for (int j = 0; j < n_starts; ++j) {
        for (int d = 0; d < k; ++d) {
            const double u = (perms[d][j] + unit(rng)) / n_starts;
            starts[j](d) = box.lower(d) + u * (box.upper(d) - box.lower(d));
        }
    }

    OptResult best;
    bool have_result = false;
    std::string first_error;
    for (int j = 0; j < n_starts; ++j) {
        try {
            OptResult r = minimize(objective, box, starts[j], config);
            if (!have_result || r.f < best.f) {
                best = std::move(r);
                have_result = true;
            }
        } catch (const NumericalError& e) {
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!have_result) {
        throw NumericalError("multistart_minimize: every start failed; first failure: " +
                             first_error);
    }
    return best;
}

}  // namespace raceline
