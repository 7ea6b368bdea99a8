#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "raceline/boxopt.hpp"
#include "raceline/curriculum.hpp"
#include "raceline/gp.hpp"
#include "raceline/ppo.hpp"

namespace raceline {

struct SearchConfig {
    Box bounds;                      // changepoint search box, epoch units
    double lambda_ucb = 1.9;
    int n_warmup = 5;
    int n_iterations = 14;
    KernelParams kernel;
    double prior_mean = 0.0;         // raw reward units
    PsiLadder ladder;
    int max_epoch = 1000;            // curriculum horizon
    int multistart = 16;
    double objective_floor = -1000.0;
    std::uint64_t master_seed = 0;
    OptimizerConfig optimizer;

    void validate() const;
};

// a(x) = posterior mean + lambda * posterior std, raw reward units.
double ucb(const GpModel& model, const Eigen::VectorXd& x, double lambda);

struct Proposal {
    Eigen::VectorXd x;
    // Set when every optimizer start failed and the proposal fell back to the
    // best point of a coarse bounds grid.
    bool grid_fallback = false;
};

// Maximizes the acquisition with multistart quasi-Newton descent on its
// negation, using analytic posterior gradients. `round` salts the start
// layout so successive proposals explore independently.
Proposal propose_next(const GpModel& model, const SearchConfig& config,
                      std::uint64_t round = 0);

// Deterministic stratified warm-up design: the box center first, then the
// four 25%/75% per-dimension mixtures of a fixed orthogonal-array pattern,
// then a Halton fill for larger budgets.
std::vector<Eigen::VectorXd> warmup_design(const Box& bounds, int n_warmup);

enum class TrialPhase { warmup, bo };

struct TrialRecord {
    int index = 0;
    Eigen::VectorXd x;         // proposed changepoints, pre-rounding
    Curriculum curriculum;     // empty when the proposal was invalid
    bool curriculum_valid = false;
    double objective = 0.0;
    TrainingCurve curve;
    TrialPhase phase = TrialPhase::warmup;
    bool grid_fallback = false;
};

struct SearchResult {
    std::vector<TrialRecord> trials;
    int best_by_final = -1;  // trial index maximizing the final objective
    int best_by_curve = -1;  // trial index maximizing the evaluation-curve peak
};

struct ObjectiveOutcome {
    double value = 0.0;
    TrainingCurve curve;
};

using SearchObjective =
    std::function<ObjectiveOutcome(const Eigen::VectorXd& x, const Curriculum& c)>;

// Called after every completed trial; used to checkpoint search state.
using TrialSink = std::function<void(const SearchResult& partial)>;

// Warm-up phase followed by n_iterations of refit / propose / evaluate.
// Invalid-curriculum proposals are recorded with the floor objective without
// invoking the objective. `resume` replays already-completed trials instead of
// re-evaluating them.
SearchResult run_search(const SearchConfig& config, const SearchObjective& objective,
                        const TrialSink& sink = {},
                        std::vector<TrialRecord> resume = {});

enum class SelectionMode { final, curve };

// mode final: argmax of the recorded objective values. mode curve: argmax of
// the highest evaluation-curve mean across all recorded evaluation epochs.
// Ties break toward the earliest trial.
const TrialRecord& select_best_trial(const SearchResult& result, SelectionMode mode);

}  // namespace raceline
