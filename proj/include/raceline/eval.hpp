#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "raceline/race_env.hpp"

namespace raceline {

struct EvalSet {
    std::vector<EnvParams> candidates;
    std::string name;
};

struct EvalSets {
    EvalSet easy;
    EvalSet hard;
};

// Easy/hard evaluation grids per environment mode. In kp mode the hard set is
// the 5x5 product of turn rates [0.31..0.71] and obstacle probabilities
// [0.05..0.13]; the 1-D modes vary a single parameter over its five values.
EvalSets build_sets(EnvMode mode);

struct MetricsReport {
    double mean_reward = 0.0;
    double std_reward = 0.0;
    double collision_obstacle_ratio = 0.0;  // per-episode collisions/obstacles, averaged
    double mean_tiles_visited = 0.0;
    double mean_grass_fraction = 0.0;
    double mean_collisions = 0.0;
    int n_eval = 0;
    std::vector<EpisodeMetrics> episodes;  // per-episode records behind the aggregates
};

// Samples n_eval (params, track seed) pairs -- params uniform over the set's
// candidates -- runs one episode each and aggregates. Deterministic given seed.
MetricsReport evaluate_policy(const Policy& policy, const EvalSet& set, int n_eval,
                              std::uint64_t seed, const EnvConfig& env,
                              int max_steps = -1);

struct BucketReport {
    EnvParams params;
    MetricsReport report;
};

// Five single-setting buckets in ascending difficulty, pairing the i-th turn
// rate with the i-th obstacle probability.
std::vector<BucketReport> difficulty_sweep(const Policy& policy, int n_per_bucket,
                                           std::uint64_t seed, const EnvConfig& env,
                                           int max_steps = -1);

}  // namespace raceline
