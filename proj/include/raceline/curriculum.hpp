#pragma once

#include <Eigen/Dense>
#include <vector>

namespace raceline {

// One environment distribution: turn rate and per-tile obstacle probability.
struct EnvParams {
    double kappa = 0.31;
    double p = 0.05;

    void validate() const;  // kappa > 0, p in [0, 1]
    bool operator==(const EnvParams&) const = default;
};

// Easiest-to-hardest sequence of environment settings whose switch times the
// search optimizes. Fixed before a search starts.
using PsiLadder = std::vector<EnvParams>;

enum class EnvMode { kp, kappa_only, p_only };

// Built-in four-step ladders per mode.
PsiLadder default_ladder(EnvMode mode);

// Piecewise-constant schedule mapping training epochs to environment
// parameters. switch_epochs[i] is the first epoch of segment i+1; segment i
// covers [switch_epochs[i-1], switch_epochs[i]) with an implicit start at 0.
struct Curriculum {
    std::vector<int> switch_epochs;   // ascending, 0 < t_1 < ... < t_k < max_epoch
    std::vector<EnvParams> segments;  // k + 1 entries
    int max_epoch = 1000;

    // The real-valued inputs that reproduce this schedule through
    // make_curriculum: the last epoch of each segment except the final one.
    std::vector<double> segment_ends() const;

    bool operator==(const Curriculum&) const = default;
};

// Builds a schedule from real-valued segment ends. ends[i] is rounded to the
// nearest integer and taken as the last epoch of segment i; the switch to
// segment i+1 happens on the following epoch. Throws CurriculumError when the
// rounded switches are not strictly ascending inside (0, max_epoch).
Curriculum make_curriculum(const Eigen::VectorXd& ends, const PsiLadder& ladder,
                           int max_epoch);

// Single-segment schedule (no switches).
Curriculum constant_curriculum(const EnvParams& params, int max_epoch);

// Parameters in effect at `epoch`. Throws std::invalid_argument outside
// [0, max_epoch).
EnvParams param_at(const Curriculum& c, int epoch);

}  // namespace raceline
