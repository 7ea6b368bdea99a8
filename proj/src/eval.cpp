#include "raceline/eval.hpp"

#include <cmath>
#include <stdexcept>

#include "raceline/rng.hpp"

namespace raceline {

namespace {
const std::vector<double> kHardKappa = {0.31, 0.41, 0.51, 0.61, 0.71};
const std::vector<double> kHardP = {0.05, 0.07, 0.09, 0.11, 0.13};
}  // namespace

EvalSets build_sets(EnvMode mode) {
    EvalSets sets;
    switch (mode) {
        case EnvMode::kp:
            sets.easy = {{{0.31, 0.05}}, "easy"};
            sets.hard.name = "hard";
            for (const double kappa : kHardKappa) {
                for (const double p : kHardP) {
                    sets.hard.candidates.push_back({kappa, p});
                }
            }
            break;
        case EnvMode::kappa_only:
            sets.easy = {{{0.31, 0.0}}, "easy"};
            sets.hard.name = "hard";
            for (const double kappa : kHardKappa) {
                sets.hard.candidates.push_back({kappa, 0.0});
            }
            break;
        case EnvMode::p_only:
            sets.easy = {{{0.31, 0.05}}, "easy"};
            sets.hard.name = "hard";
            for (const double p : kHardP) {
                sets.hard.candidates.push_back({0.31, p});
            }
            break;
    }
    return sets;
}

MetricsReport evaluate_policy(const Policy& policy, const EvalSet& set, int n_eval,
                              std::uint64_t seed, const EnvConfig& env, int max_steps) {
    if (n_eval < 1) {
        throw std::invalid_argument("evaluate_policy: n_eval must be >= 1");
    }
    if (set.candidates.empty()) {
        throw std::invalid_argument("evaluate_policy: empty evaluation set");
    }

    MetricsReport report;
    report.n_eval = n_eval;
    report.episodes.reserve(static_cast<std::size_t>(n_eval));
    // Each episode is a pure function of (seed, index): episodes can be run in
    // any order or in parallel and the report stays identical.
    std::uniform_int_distribution<std::size_t> pick(0, set.candidates.size() - 1);
    for (int i = 0; i < n_eval; ++i) {
        auto rng = make_rng(seed, "eval-sample", static_cast<std::uint64_t>(i));
        const EnvParams params = set.candidates[pick(rng)];
        const std::uint64_t track_seed = rng();
        const Track track = generate_track(params, track_seed, env);
        report.episodes.push_back(run_episode(
            track, policy, derive_seed(seed, "eval-episode", static_cast<std::uint64_t>(i)),
            max_steps));
    }

    double sum = 0.0;
    double ratio_sum = 0.0;
    double tiles_sum = 0.0;
    double grass_sum = 0.0;
    double collisions_sum = 0.0;
    for (const EpisodeMetrics& m : report.episodes) {
        sum += m.total_reward;
        ratio_sum += m.obstacle_count > 0
                         ? static_cast<double>(m.collisions) / m.obstacle_count
                         : 0.0;
        tiles_sum += m.tiles_visited;
        grass_sum += m.grass_fraction;
        collisions_sum += m.collisions;
    }
    const double n = static_cast<double>(n_eval);
    report.mean_reward = sum / n;
    double sq = 0.0;
    for (const EpisodeMetrics& m : report.episodes) {
        const double d = m.total_reward - report.mean_reward;
        sq += d * d;
    }
    report.std_reward = std::sqrt(sq / n);
    report.collision_obstacle_ratio = ratio_sum / n;
    report.mean_tiles_visited = tiles_sum / n;
    report.mean_grass_fraction = grass_sum / n;
    report.mean_collisions = collisions_sum / n;
    return report;
}

std::vector<BucketReport> difficulty_sweep(const Policy& policy, int n_per_bucket,
                                           std::uint64_t seed, const EnvConfig& env,
                                           int max_steps) {
    if (n_per_bucket < 1) {
        throw std::invalid_argument("difficulty_sweep: n_per_bucket must be >= 1");
    }
    std::vector<BucketReport> buckets;
    for (std::size_t i = 0; i < kHardKappa.size(); ++i) {
        BucketReport bucket;
        bucket.params = {kHardKappa[i], kHardP[i]};
        EvalSet set{{bucket.params}, "bucket_" + std::to_string(i + 1)};
        bucket.report = evaluate_policy(policy, set, n_per_bucket,
                                        derive_seed(seed, "bucket", i), env, max_steps);
        buckets.push_back(std::move(bucket));
    }
    return buckets;
}

}  // namespace raceline
