#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

#include "raceline/curriculum.hpp"

namespace raceline {

// Lookahead window of the feature observation; fixed so policy shapes are
// stable across configurations.
inline constexpr int kLookahead = 5;
inline constexpr int kObservationDim = 3 + 2 * kLookahead;
inline constexpr int kActionDim = 3;

using Observation = Eigen::Matrix<double, kObservationDim, 1>;

// Environment scale and kinematic constants. Lengths are measured in tiles
// (longitudinal) and road half-widths (lateral).
struct EnvConfig {
    int n_tiles_base = 300;      // target tile count, jittered per seed
    double tile_jitter = 0.15;   // +-fraction applied to n_tiles_base
    int max_steps = 2000;

    double max_speed = 0.5;      // tiles per step; < 1 so at most one tile is crossed per step
    double accel_gain = 0.04;
    double brake_gain = 0.08;
    double drag = 0.02;
    double steer_gain = 1.2;     // radians per tile at full lock, at standstill
    double grip_speed = 0.25;    // speed where steering authority halves twice
    double heading_align = 0.5;  // self-centering: fraction of heading error shed per tile
    double lateral_gain = 2.0;   // half-widths of lateral motion per tile at 1 rad heading error
    double grass_speed_factor = 0.5;
    double car_half_width = 0.15;
    double obstacle_half_width = 0.35;

    // Achievable path curvature at a given speed; tight corners require
    // slowing down.
    double turn_capacity(double speed) const {
        const double ratio = speed / grip_speed;
        return steer_gain / (1.0 + ratio * ratio);
    }
};

struct Tile {
    double curvature = 0.0;        // radians turned per tile, signed
    bool has_obstacle = false;
    double obstacle_offset = 0.0;  // lateral center in [-1, 1]
};

struct Track {
    std::vector<Tile> tiles;
    EnvParams params;
    std::uint64_t seed = 0;
    EnvConfig config;

    int n_tiles() const { return static_cast<int>(tiles.size()); }
    int obstacle_count() const;
    double tile_reward() const { return 1000.0 / n_tiles(); }
};

// Deterministic given (params, seed). Tile curvature magnitudes scale with
// kappa; each tile independently receives an obstacle with probability p;
// signed curvatures sum to exactly one full turn.
Track generate_track(const EnvParams& params, std::uint64_t seed,
                     const EnvConfig& config = {});

struct Action {
    double steering = 0.0;  // [-1, 1]
    double accel = 0.0;     // [0, 1]
    double brake = 0.0;     // [0, 1]
};

struct EpisodeState {
    double arc = 0.0;            // unbounded longitudinal position, tile units
    double lateral_offset = 0.0; // road half-widths; |.| > 1 means on grass
    double speed = 0.0;
    double heading_error = 0.0;  // radians relative to the road tangent
    int step_count = 0;
    int max_steps = 2000;
    bool on_grass = false;
    bool terminated = false;
    bool lap_complete = false;
    std::vector<std::uint8_t> visited;         // per-tile first-crossing flags
    std::vector<std::uint8_t> obstacle_alive;  // obstacles are consumed on collision
    int visited_count = 0;
    int collision_count = 0;

    int tile_index(int n_tiles) const {
        return static_cast<int>(static_cast<long long>(arc) % n_tiles);
    }
};

struct StepEvents {
    int new_tiles = 0;
    bool collided = false;
    bool on_grass = false;
};

struct StepOutcome {
    double reward = 0.0;
    StepEvents events;
    bool done = false;
};

EpisodeState make_episode(const Track& track);

Observation observe(const Track& track, const EpisodeState& state);

// Advances one step. Reward decomposes exactly as
//   -0.1 + tile_reward * new_tiles - 50 * collided.
// Throws StateError when the episode is already terminated.
StepOutcome step(const Track& track, EpisodeState& state, const Action& action);

// Policies may consume randomness (action sampling); deterministic policies
// ignore the generator.
using Policy = std::function<Action(const Observation&, std::mt19937_64&)>;

struct EpisodeMetrics {
    double total_reward = 0.0;
    int tiles_visited = 0;
    int collisions = 0;
    double grass_fraction = 0.0;
    int obstacle_count = 0;
    int steps = 0;
    bool lap_complete = false;

    bool operator==(const EpisodeMetrics&) const = default;
};

// Runs one episode; max_steps < 0 uses track.config.max_steps. When `trace`
// is given, per-step rows (step, reward, tile_index, lateral_offset, flags)
// are written as CSV.
EpisodeMetrics run_episode(const Track& track, const Policy& policy,
                           std::uint64_t seed, int max_steps = -1,
                           std::ostream* trace = nullptr);

// Scripted controller used as a competent baseline: follows the road with a
// feedforward-plus-PD steering law, dodges upcoming obstacles, slows for
// sharp corners.
Policy reference_policy(const EnvConfig& config = {});

}  // namespace raceline
