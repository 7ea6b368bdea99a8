#include "raceline/race_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "raceline/errors.hpp"
#include "raceline/rng.hpp"

namespace raceline {

namespace {

constexpr double kStepPenalty = -0.1;
constexpr double kCollisionPenalty = -50.0;

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

int Track::obstacle_count() const {
    int count = 0;
    for (const Tile& t : tiles) count += t.has_obstacle ? 1 : 0;
    return count;
}

Track generate_track(const EnvParams& params, std::uint64_t seed,
                     const EnvConfig& config) {
    params.validate();

    Track track;
    track.params = params;
    track.seed = seed;
    track.config = config;

    // Tile count and corner layout come from kappa-independent streams so the
    // same seed yields the same track shape across difficulty settings.
    auto rng_size = make_rng(seed, "track-size");
    std::uniform_real_distribution<double> jitter(-config.tile_jitter, config.tile_jitter);
    const int n = std::max(50, static_cast<int>(std::lround(
                                   config.n_tiles_base * (1.0 + jitter(rng_size)))));
    track.tiles.resize(n);

    auto rng_shape = make_rng(seed, "track-shape");
    std::vector<double> shape(n, 0.0);
    const int n_corners = std::max(3, n / 18);
    std::uniform_int_distribution<int> corner_len(4, 10);
    std::uniform_int_distribution<int> corner_at(0, n - 1);
    std::uniform_real_distribution<double> corner_mag(0.3, 0.6);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int c = 0; c < n_corners; ++c) {
        const int len = corner_len(rng_shape);
        const int at = corner_at(rng_shape);
        const double mag = corner_mag(rng_shape);
        const double sign = coin(rng_shape) ? 1.0 : -1.0;
        for (int j = 0; j < len; ++j) {
            shape[static_cast<std::size_t>((at + j) % n)] += sign * mag;
        }
    }
    const double mean = std::accumulate(shape.begin(), shape.end(), 0.0) / n;
    const double base_turn = 2.0 * std::numbers::pi / n;  // closure share per tile
    for (int i = 0; i < n; ++i) {
        track.tiles[static_cast<std::size_t>(i)].curvature =
            params.kappa * (shape[static_cast<std::size_t>(i)] - mean) + base_turn;
    }

    auto rng_obst = make_rng(seed, "track-obstacles");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> offset(-0.7, 0.7);
    for (Tile& tile : track.tiles) {
        if (unit(rng_obst) < params.p) {
            tile.has_obstacle = true;
            tile.obstacle_offset = offset(rng_obst);
        }
    }
    return track;
}

EpisodeState make_episode(const Track& track) {
    EpisodeState state;
    const auto n = static_cast<std::size_t>(track.n_tiles());
    state.visited.assign(n, 0);
    state.obstacle_alive.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        state.obstacle_alive[i] = track.tiles[i].has_obstacle ? 1 : 0;
    }
    state.max_steps = track.config.max_steps;
    return state;
}

Observation observe(const Track& track, const EpisodeState& state) {
    Observation o;
    o(0) = state.lateral_offset;
    o(1) = state.heading_error;
    o(2) = state.speed;
    const int n = track.n_tiles();
    const int t = state.tile_index(n);
    for (int j = 0; j < kLookahead; ++j) {
        const int idx = t + j;
        if (idx >= n) {
            // lookahead does not wrap; the window past the final tile is zero
            o(3 + 2 * j) = 0.0;
            o(4 + 2 * j) = 0.0;
            continue;
        }
        const Tile& tile = track.tiles[static_cast<std::size_t>(idx)];
        o(3 + 2 * j) = tile.curvature;
        o(4 + 2 * j) =
            state.obstacle_alive[static_cast<std::size_t>(idx)] ? tile.obstacle_offset : 0.0;
    }
    return o;
}

StepOutcome step(const Track& track, EpisodeState& state, const Action& action) {
    if (state.terminated) {
        throw StateError("step: episode already terminated");
    }
    const EnvConfig& cf = track.config;
    const int n = track.n_tiles();

    const double steer = std::clamp(action.steering, -1.0, 1.0);
    const double accel = std::clamp(action.accel, 0.0, 1.0);
    const double brake = std::clamp(action.brake, 0.0, 1.0);

    const double cap =
        state.on_grass ? cf.grass_speed_factor * cf.max_speed : cf.max_speed;
    state.speed = std::clamp(
        state.speed + cf.accel_gain * accel - cf.brake_gain * brake - cf.drag * state.speed,
        0.0, cap);
    const double ds = state.speed;

    const int tile_now = state.tile_index(n);
    state.heading_error = wrap_angle(
        (1.0 - cf.heading_align * ds) * state.heading_error +
        ds * (cf.turn_capacity(state.speed) * steer -
              track.tiles[static_cast<std::size_t>(tile_now)].curvature));
    state.lateral_offset = std::clamp(
        state.lateral_offset + ds * cf.lateral_gain * std::sin(state.heading_error), -2.0, 2.0);

    const auto arc_before = static_cast<long long>(state.arc);
    state.arc += ds;
    const auto arc_after = static_cast<long long>(state.arc);

    StepOutcome out;
    const bool on_road = std::abs(state.lateral_offset) <= 1.0;
    for (long long b = arc_before + 1; b <= arc_after; ++b) {
        const auto j = static_cast<std::size_t>(b % n);
        // tiles pay out only when crossed on the road; a tile passed on the
        // grass is forfeited for the rest of the episode
        if (on_road && !state.visited[j]) {
            state.visited[j] = 1;
            ++state.visited_count;
            ++out.events.new_tiles;
        }
        if (state.obstacle_alive[j]) {
            const double gap =
                std::abs(state.lateral_offset - track.tiles[j].obstacle_offset);
            if (gap < cf.car_half_width + cf.obstacle_half_width) {
                state.obstacle_alive[j] = 0;
                ++state.collision_count;
                out.events.collided = true;
            }
        }
    }

    state.on_grass = std::abs(state.lateral_offset) > 1.0;
    out.events.on_grass = state.on_grass;
    ++state.step_count;

    if (state.visited_count == n) {
        state.terminated = true;
        state.lap_complete = true;
    } else if (state.step_count >= state.max_steps) {
        state.terminated = true;
    }

    out.reward = kStepPenalty + track.tile_reward() * out.events.new_tiles +
                 kCollisionPenalty * (out.events.collided ? 1.0 : 0.0);
    out.done = state.terminated;
    return out;
}

EpisodeMetrics run_episode(const Track& track, const Policy& policy,
                           std::uint64_t seed, int max_steps, std::ostream* trace) {
    EpisodeState state = make_episode(track);
    if (max_steps >= 0) state.max_steps = max_steps;

    auto rng = make_rng(seed, "episode");
    EpisodeMetrics metrics;
    metrics.obstacle_count = track.obstacle_count();

    if (trace) {
        *trace << "step,reward,tile_index,lateral_offset,new_tiles,collided,on_grass\n";
    }
    int grass_steps = 0;
    while (!state.terminated) {
        const Observation obs = observe(track, state);
        const Action action = policy(obs, rng);
        const StepOutcome out = step(track, state, action);
        metrics.total_reward += out.reward;
        grass_steps += out.events.on_grass ? 1 : 0;
        if (trace) {
            *trace << state.step_count << ',' << out.reward << ','
                   << state.tile_index(track.n_tiles()) << ',' << state.lateral_offset
                   << ',' << out.events.new_tiles << ',' << (out.events.collided ? 1 : 0)
                   << ',' << (out.events.on_grass ? 1 : 0) << '\n';
        }
    }

    metrics.steps = state.step_count;
    metrics.tiles_visited = state.visited_count;
    metrics.collisions = state.collision_count;
    metrics.grass_fraction =
        state.step_count > 0 ? static_cast<double>(grass_steps) / state.step_count : 0.0;
    metrics.lap_complete = state.lap_complete;
    return metrics;
}

Policy reference_policy(const EnvConfig& config) {
    return [config](const Observation& o, std::mt19937_64&) -> Action {
        const double d = o(0);
        const double psi = o(1);
        const double v = o(2);

        // Dodge the nearest live obstacle in the first three lookahead tiles.
        double target_d = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double obs_off = o(4 + 2 * j);
            if (obs_off != 0.0 && std::abs(obs_off - d) < 0.9) {
                target_d = obs_off - (obs_off >= 0.0 ? 1.0 : -1.0);
                break;
            }
        }

        const double capacity = config.turn_capacity(v);
        const double psi_target = std::clamp(0.8 * (target_d - d), -0.5, 0.5);
        const double steer_ff = o(3) / capacity;  // follow the current tile
        const double steer = std::clamp(steer_ff + 2.0 * (psi_target - psi), -1.0, 1.0);

        double sharpest = 0.0;
        for (int j = 0; j < kLookahead; ++j) {
            sharpest = std::max(sharpest, std::abs(o(3 + 2 * j)));
        }
        // fastest speed whose turn capacity still covers the upcoming corner,
        // with a safety margin
        const double demand = std::max(1.3 * sharpest, 1e-6);
        double v_target = config.max_speed;
        if (demand < config.steer_gain) {
            v_target = std::min(config.max_speed,
                                config.grip_speed *
                                    std::sqrt(config.steer_gain / demand - 1.0));
        } else {
            v_target = 0.5 * config.grip_speed;
        }

        Action a;
        a.steering = steer;
        a.accel = v < v_target ? 1.0 : 0.0;
        a.brake = v > v_target + 0.05 ? 0.5 : 0.0;
        return a;
    };
}

}  // namespace raceline
