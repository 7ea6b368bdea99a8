#include "raceline/bo_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "raceline/errors.hpp"
#include "raceline/rng.hpp"

namespace raceline {

void SearchConfig::validate() const {
    bounds.validate();
    kernel.validate();
    optimizer.validate();
    if (n_warmup < 1) {
        throw std::invalid_argument("SearchConfig: n_warmup must be >= 1");
    }
    if (n_iterations < 0) {
        throw std::invalid_argument("SearchConfig: n_iterations must be >= 0");
    }
    if (lambda_ucb < 0.0) {
        throw std::invalid_argument("SearchConfig: lambda_ucb must be >= 0");
    }
    if (multistart < 1) {
        throw std::invalid_argument("SearchConfig: multistart must be >= 1");
    }
    if (ladder.size() != static_cast<std::size_t>(bounds.dim()) + 1) {
        throw std::invalid_argument("SearchConfig: ladder must have bounds.dim() + 1 entries");
    }
}

double ucb(const GpModel& model, const Eigen::VectorXd& x, double lambda) {
    const Posterior post = posterior(model, x);
    return post.mean + lambda * post.std;
}

namespace {

// Best acquisition value over a coarse grid; used only when every optimizer
// start fails.
Eigen::VectorXd grid_fallback_argmax(const GpModel& model, const SearchConfig& config) {
    const int k = config.bounds.dim();
    constexpr int kPerDim = 21;
    Eigen::VectorXd best;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    for (;;) {
        Eigen::VectorXd x(k);
        for (int d = 0; d < k; ++d) {
            x(d) = config.bounds.lower(d) + (config.bounds.upper(d) - config.bounds.lower(d)) *
                                                idx[static_cast<std::size_t>(d)] /
                                                (kPerDim - 1);
        }
        const double val = ucb(model, x, config.lambda_ucb);
        if (val > best_val) {
            best_val = val;
            best = x;
        }
        int d = 0;
        for (; d < k; ++d) {
            if (++idx[static_cast<std::size_t>(d)] < kPerDim) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
        if (d == k) break;
    }
    return best;
}

double halton(std::uint64_t index, int base) {
    double f = 1.0;
    double r = 0.0;
    std::uint64_t i = index;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

double curve_peak(const TrialRecord& trial) {
    double peak = -std::numeric_limits<double>::infinity();
    for (const EvalPoint& e : trial.curve.evals) {
        peak = std::max(peak, e.mean_reward);
    }
    return peak;
}

}  // namespace

Proposal propose_next(const GpModel& model, const SearchConfig& config,
                      std::uint64_t round) {
    config.bounds.validate();
    const double lambda = config.lambda_ucb;
    GradObjective neg_ucb = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const Posterior post = posterior(model, x);
        const PosteriorGradient g = posterior_gradient(model, x);
        grad = -(g.dmean + lambda * g.dstd);
        return -(post.mean + lambda * post.std);
    };

    Proposal proposal;
    try {
        OptResult r = multistart_minimize(
            neg_ucb, config.bounds, config.multistart,
            derive_seed(config.master_seed, "acquisition", round), config.optimizer);
        proposal.x = config.bounds.clamp(r.x);
    } catch (const NumericalError&) {
        proposal.x = grid_fallback_argmax(model, config);
        proposal.grid_fallback = true;
    }
    return proposal;
}

std::vector<Eigen::VectorXd> warmup_design(const Box& bounds, int n_warmup) {
    bounds.validate();
    if (n_warmup < 1) {
        throw std::invalid_argument("warmup_design: n_warmup must be >= 1");
    }
    const int k = bounds.dim();
    const Eigen::VectorXd span = bounds.upper - bounds.lower;

    std::vector<Eigen::VectorXd> points;
    points.reserve(static_cast<std::size_t>(n_warmup));
    points.push_back(bounds.lower + 0.5 * span);

    // Two-level orthogonal-array rows at the 25%/75% mixtures; balanced in
    // every dimension for k <= 3 and still well spread beyond.
    static const int kPattern[4][3] = {{-1, -1, -1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, -1}};
    for (int row = 0; row < 4 && static_cast<int>(points.size()) < n_warmup; ++row) {
        Eigen::VectorXd x(k);
        for (int d = 0; d < k; ++d) {
            const double frac = kPattern[row][d % 3] < 0 ? 0.25 : 0.75;
            x(d) = bounds.lower(d) + frac * span(d);
        }
        points.push_back(x);
    }

    static const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::uint64_t halton_index = 1;
    while (static_cast<int>(points.size()) < n_warmup) {
        Eigen::VectorXd x(k);
        for (int d = 0; d < k; ++d) {
            x(d) = bounds.lower(d) +
                   halton(halton_index, kPrimes[d % 8]) * span(d);
        }
        points.push_back(x);
        ++halton_index;
    }
    return points;
}

SearchResult run_search(const SearchConfig& config, const SearchObjective& objective,
                        const TrialSink& sink, std::vector<TrialRecord> resume) {
    config.validate();
    if (!objective) {
        throw std::invalid_argument("run_search: objective is required");
    }

    SearchResult result;
    result.trials = std::move(resume);
    const int total = config.n_warmup + config.n_iterations;
    if (static_cast<int>(result.trials.size()) > total) {
        throw std::invalid_argument("run_search: resume has more trials than the budget");
    }

    const std::vector<Eigen::VectorXd> warmup =
        warmup_design(config.bounds, config.n_warmup);

    auto update_best = [&result] {
        result.best_by_final = static_cast<int>(
            select_best_trial(result, SelectionMode::final).index);
        result.best_by_curve = static_cast<int>(
            select_best_trial(result, SelectionMode::curve).index);
    };

    auto run_trial = [&](const Eigen::VectorXd& x, TrialPhase phase, bool fallback) {
        TrialRecord trial;
        trial.index = static_cast<int>(result.trials.size());
        trial.x = x;
        trial.phase = phase;
        trial.grid_fallback = fallback;
        try {
            trial.curriculum = make_curriculum(x, config.ladder, config.max_epoch);
            trial.curriculum_valid = true;
        } catch (const CurriculumError&) {
            trial.curriculum_valid = false;
        }
        if (trial.curriculum_valid) {
            const ObjectiveOutcome outcome = objective(x, trial.curriculum);
            trial.objective = std::isfinite(outcome.value) ? outcome.value
                                                           : config.objective_floor;
            trial.curve = outcome.curve;
        } else {
            trial.objective = config.objective_floor;
        }
        result.trials.push_back(std::move(trial));
        update_best();
        if (sink) sink(result);
    };

    for (int i = static_cast<int>(result.trials.size()); i < config.n_warmup; ++i) {
        run_trial(warmup[static_cast<std::size_t>(i)], TrialPhase::warmup, false);
    }

    while (static_cast<int>(result.trials.size()) < total) {
        const int n = static_cast<int>(result.trials.size());
        Eigen::MatrixXd X(n, config.bounds.dim());
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            X.row(i) = result.trials[static_cast<std::size_t>(i)].x.transpose();
            y(i) = result.trials[static_cast<std::size_t>(i)].objective;
        }
        const GpModel model = fit_gp(X, y, config.kernel, config.prior_mean);
        const Proposal proposal =
            propose_next(model, config, static_cast<std::uint64_t>(n));
        run_trial(proposal.x, TrialPhase::bo, proposal.grid_fallback);
    }

    update_best();
    return result;
}

const TrialRecord& select_best_trial(const SearchResult& result, SelectionMode mode) {
    if (result.trials.empty()) {
        throw std::invalid_argument("select_best_trial: no trials");
    }
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const TrialRecord& t = result.trials[i];
        const double score = mode == SelectionMode::final ? t.objective : curve_peak(t);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return result.trials[best];
}

}  // namespace raceline
