#include "raceline/run.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "raceline/eval.hpp"
#include "raceline/io.hpp"
#include "raceline/policy.hpp"
#include "raceline/rng.hpp"

namespace raceline {

namespace fs = std::filesystem;

namespace {

std::string env_mode_name(EnvMode mode) {
    switch (mode) {
        case EnvMode::kp: return "kp";
        case EnvMode::kappa_only: return "kappa";
        case EnvMode::p_only: return "p";
    }
    return "kp";
}

EnvMode env_mode_from_name(const std::string& name) {
    if (name == "kp") return EnvMode::kp;
    if (name == "kappa") return EnvMode::kappa_only;
    if (name == "p") return EnvMode::p_only;
    throw std::invalid_argument("unknown env mode: " + name + " (expected kp|kappa|p)");
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig default_config(const std::string& profile) {
    RunConfig c;
    c.profile = profile;
    c.search.kernel.signal_variance = 1.0;
    c.search.kernel.noise_variance = 0.01;
    c.search.lambda_ucb = 1.9;
    c.search.n_warmup = 5;
    c.search.multistart = 16;

    if (profile == "paper") {
        c.env.n_tiles_base = 300;
        c.env.max_steps = 2000;
        c.train.learning_rate = 0.0002;
        c.train.batch_size = 1000;
        c.train.total_epochs = 1000;
        c.train.eval_every = 50;
        c.train.hidden = 32;
        c.train.max_episode_steps = 2000;
        c.learning_rate_default = 0.0005;
        c.search.bounds.lower = to_vec({150.0, 330.0, 730.0});
        c.search.bounds.upper = to_vec({250.0, 450.0, 830.0});
        c.search.kernel.length_scales = to_vec({19.9, 26.5, 21.15});
        c.search.n_iterations = 14;
        c.manual_ends = {197.0, 395.0, 774.0};
        c.eval_n = 500;
        c.sweep_n = 100;
        c.final_eval_n = 500;
    } else if (profile == "desk") {
        // Paper-scale epochs and bounds scaled by 120/1000.
        c.env.n_tiles_base = 100;
        c.env.max_steps = 600;
        c.train.learning_rate = 0.0002;
        c.train.batch_size = 256;
        c.train.total_epochs = 120;
        c.train.eval_every = 20;
        c.train.hidden = 16;
        c.train.max_episode_steps = 300;
        c.learning_rate_default = 0.0005;
        c.search.bounds.lower = to_vec({18.0, 40.0, 88.0});
        c.search.bounds.upper = to_vec({30.0, 54.0, 100.0});
        c.search.kernel.length_scales = to_vec({2.39, 3.18, 2.54});
        c.search.n_iterations = 10;
        c.manual_ends = {24.0, 47.0, 93.0};
        c.eval_n = 100;
        c.sweep_n = 100;
        c.final_eval_n = 100;
    } else {
        throw std::invalid_argument("unknown profile: " + profile + " (expected desk|paper)");
    }
    return c;
}

void apply_json(RunConfig& c, const nlohmann::json& j) {
    maybe(j, "mode", c.mode);
    maybe(j, "seed", c.seed);
    maybe(j, "out", c.out_dir);
    if (j.contains("env_mode")) {
        c.env_mode = env_mode_from_name(j.at("env_mode").get<std::string>());
    }
    maybe(j, "manual_ends", c.manual_ends);
    maybe(j, "checkpoint", c.checkpoint);
    maybe(j, "eval_set", c.eval_set);
    maybe(j, "eval_n", c.eval_n);
    maybe(j, "sweep_n", c.sweep_n);
    maybe(j, "final_eval_n", c.final_eval_n);

    if (j.contains("env")) {
        const auto& e = j.at("env");
        maybe(e, "n_tiles_base", c.env.n_tiles_base);
        maybe(e, "tile_jitter", c.env.tile_jitter);
        maybe(e, "max_steps", c.env.max_steps);
        maybe(e, "max_speed", c.env.max_speed);
        maybe(e, "accel_gain", c.env.accel_gain);
        maybe(e, "brake_gain", c.env.brake_gain);
        maybe(e, "drag", c.env.drag);
        maybe(e, "steer_gain", c.env.steer_gain);
        maybe(e, "grip_speed", c.env.grip_speed);
        maybe(e, "heading_align", c.env.heading_align);
        maybe(e, "lateral_gain", c.env.lateral_gain);
        maybe(e, "grass_speed_factor", c.env.grass_speed_factor);
        maybe(e, "car_half_width", c.env.car_half_width);
        maybe(e, "obstacle_half_width", c.env.obstacle_half_width);
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        maybe(t, "learning_rate", c.train.learning_rate);
        maybe(t, "learning_rate_default", c.learning_rate_default);
        maybe(t, "update_epochs", c.train.update_epochs);
        maybe(t, "batch_size", c.train.batch_size);
        maybe(t, "total_epochs", c.train.total_epochs);
        maybe(t, "clip_epsilon", c.train.clip_epsilon);
        maybe(t, "gamma", c.train.gamma);
        maybe(t, "gae_lambda", c.train.gae_lambda);
        maybe(t, "eval_every", c.train.eval_every);
        maybe(t, "eval_n", c.train.eval_n);
        maybe(t, "hidden", c.train.hidden);
        maybe(t, "entropy_coeff", c.train.entropy_coeff);
        maybe(t, "value_coeff", c.train.value_coeff);
        maybe(t, "max_episode_steps", c.train.max_episode_steps);
        maybe(t, "init_log_std", c.train.init_log_std);
        maybe(t, "divergence_floor", c.train.divergence_floor);
    }
    if (j.contains("search")) {
        const auto& s = j.at("search");
        if (s.contains("bounds_lower")) {
            c.search.bounds.lower = to_vec(s.at("bounds_lower").get<std::vector<double>>());
        }
        if (s.contains("bounds_upper")) {
            c.search.bounds.upper = to_vec(s.at("bounds_upper").get<std::vector<double>>());
        }
        maybe(s, "lambda_ucb", c.search.lambda_ucb);
        maybe(s, "n_warmup", c.search.n_warmup);
        maybe(s, "n_iterations", c.search.n_iterations);
        if (s.contains("length_scales")) {
            c.search.kernel.length_scales =
                to_vec(s.at("length_scales").get<std::vector<double>>());
        }
        maybe(s, "signal_variance", c.search.kernel.signal_variance);
        maybe(s, "noise_variance", c.search.kernel.noise_variance);
        maybe(s, "prior_mean", c.search.prior_mean);
        maybe(s, "multistart", c.search.multistart);
        maybe(s, "objective_floor", c.search.objective_floor);
        if (s.contains("ladder")) {
            PsiLadder ladder;
            for (const auto& entry : s.at("ladder")) {
                ladder.push_back(env_params_from_json(entry));
            }
            c.search.ladder = ladder;
        }
        if (s.contains("optimizer")) {
            const auto& o = s.at("optimizer");
            maybe(o, "memory", c.search.optimizer.memory);
            maybe(o, "max_iters", c.search.optimizer.max_iters);
            maybe(o, "grad_tol", c.search.optimizer.grad_tol);
            maybe(o, "f_tol", c.search.optimizer.f_tol);
        }
    }
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json ladder = nlohmann::json::array();
    const PsiLadder resolved =
        c.search.ladder.empty() ? default_ladder(c.env_mode) : c.search.ladder;
    for (const EnvParams& psi : resolved) ladder.push_back(to_json(psi));
    return {
        {"mode", c.mode},
        {"profile", c.profile},
        {"seed", c.seed},
        {"out", c.out_dir},
        {"env_mode", env_mode_name(c.env_mode)},
        {"manual_ends", c.manual_ends},
        {"checkpoint", c.checkpoint},
        {"eval_set", c.eval_set},
        {"eval_n", c.eval_n},
        {"sweep_n", c.sweep_n},
        {"final_eval_n", c.final_eval_n},
        {"env",
         {{"n_tiles_base", c.env.n_tiles_base},
          {"tile_jitter", c.env.tile_jitter},
          {"max_steps", c.env.max_steps},
          {"max_speed", c.env.max_speed},
          {"accel_gain", c.env.accel_gain},
          {"brake_gain", c.env.brake_gain},
          {"drag", c.env.drag},
          {"steer_gain", c.env.steer_gain},
          {"grip_speed", c.env.grip_speed},
          {"heading_align", c.env.heading_align},
          {"lateral_gain", c.env.lateral_gain},
          {"grass_speed_factor", c.env.grass_speed_factor},
          {"car_half_width", c.env.car_half_width},
          {"obstacle_half_width", c.env.obstacle_half_width}}},
        {"train",
         {{"learning_rate", c.train.learning_rate},
          {"learning_rate_default", c.learning_rate_default},
          {"update_epochs", c.train.update_epochs},
          {"batch_size", c.train.batch_size},
          {"total_epochs", c.train.total_epochs},
          {"clip_epsilon", c.train.clip_epsilon},
          {"gamma", c.train.gamma},
          {"gae_lambda", c.train.gae_lambda},
          {"eval_every", c.train.eval_every},
          {"eval_n", c.train.eval_n},
          {"hidden", c.train.hidden},
          {"entropy_coeff", c.train.entropy_coeff},
          {"value_coeff", c.train.value_coeff},
          {"max_episode_steps", c.train.max_episode_steps},
          {"init_log_std", c.train.init_log_std},
          {"divergence_floor", c.train.divergence_floor}}},
        {"search",
         {{"bounds_lower",
           std::vector<double>(c.search.bounds.lower.data(),
                               c.search.bounds.lower.data() + c.search.bounds.lower.size())},
          {"bounds_upper",
           std::vector<double>(c.search.bounds.upper.data(),
                               c.search.bounds.upper.data() + c.search.bounds.upper.size())},
          {"lambda_ucb", c.search.lambda_ucb},
          {"n_warmup", c.search.n_warmup},
          {"n_iterations", c.search.n_iterations},
          {"length_scales",
           std::vector<double>(
               c.search.kernel.length_scales.data(),
               c.search.kernel.length_scales.data() + c.search.kernel.length_scales.size())},
          {"signal_variance", c.search.kernel.signal_variance},
          {"noise_variance", c.search.kernel.noise_variance},
          {"prior_mean", c.search.prior_mean},
          {"multistart", c.search.multistart},
          {"objective_floor", c.search.objective_floor},
          {"ladder", ladder},
          {"optimizer",
           {{"memory", c.search.optimizer.memory},
            {"max_iters", c.search.optimizer.max_iters},
            {"grad_tol", c.search.optimizer.grad_tol},
            {"f_tol", c.search.optimizer.f_tol}}}}},
    };
}

std::uint64_t config_digest(const RunConfig& c) {
    nlohmann::json j = to_json(c);
    j.erase("out");
    return fnv1a64(j.dump());
}

namespace {

struct RunContext {
    RunConfig config;
    fs::path out;
    std::uint64_t digest = 0;
    EvalSets sets;
    PsiLadder ladder;
};

RunContext prepare(const RunConfig& input) {
    RunContext ctx;
    ctx.config = input;
    ctx.ladder = input.search.ladder.empty() ? default_ladder(input.env_mode)
                                             : input.search.ladder;
    ctx.config.search.ladder = ctx.ladder;
    ctx.config.search.max_epoch = ctx.config.train.total_epochs;
    ctx.config.search.master_seed = ctx.config.seed;
    ctx.config.search.objective_floor = ctx.config.train.divergence_floor;
    ctx.out = fs::path(ctx.config.out_dir);
    fs::create_directories(ctx.out);
    ctx.digest = config_digest(ctx.config);
    ctx.sets = build_sets(ctx.config.env_mode);
    write_manifest(ctx.out / "manifest.json", to_json(ctx.config), ctx.digest);
    return ctx;
}

void finish_training_run(const RunContext& ctx, const std::string& scheme,
                         const Curriculum& curriculum, const TrainResult& trained) {
    write_curve_csv(ctx.out / "curve.csv", trained.curve);
    save_curriculum(ctx.out / "curriculum.json", curriculum);
    save_policy(ctx.out / "policy.bin", trained.policy, ctx.digest);
    const MetricsReport report = evaluate_policy(
        make_greedy_policy(trained.policy), ctx.sets.hard, ctx.config.final_eval_n,
        derive_seed(ctx.config.seed, "final-eval"), ctx.config.env);
    write_metrics_csv(ctx.out / "metrics.csv", scheme, ctx.sets.hard.name, report);
    std::cout << scheme << ": hard-set mean reward " << report.mean_reward << " +- "
              << report.std_reward << " over " << report.n_eval << " episodes"
              << (trained.curve.diverged ? " (training diverged)" : "") << "\n";
}

int run_train(const RunContext& ctx, bool manual) {
    const RunConfig& c = ctx.config;
    Curriculum curriculum;
    TrainConfig train_config = c.train;
    if (manual) {
        curriculum = make_curriculum(to_vec(c.manual_ends), ctx.ladder,
                                     c.train.total_epochs);
    } else {
        curriculum = constant_curriculum(ctx.ladder.front(), c.train.total_epochs);
        train_config.learning_rate = c.learning_rate_default;
    }
    const TrainResult trained =
        train(curriculum, train_config, c.seed, ctx.sets.hard, c.env);
    finish_training_run(ctx, manual ? "manual" : "default", curriculum, trained);
    return 0;
}

int run_search_mode(const RunContext& ctx) {
    const RunConfig& c = ctx.config;

    std::vector<TrialRecord> resume;
    if (!c.checkpoint.empty()) {
        resume = load_search_checkpoint(c.checkpoint, ctx.digest);
        std::cout << "resuming from " << c.checkpoint << " with " << resume.size()
                  << " completed trials\n";
    }

    double best_y = -std::numeric_limits<double>::infinity();
    for (const TrialRecord& t : resume) best_y = std::max(best_y, t.objective);

    SearchObjective objective = [&](const Eigen::VectorXd& /*x*/, const Curriculum& cur) {
        const TrainResult trained = train(cur, c.train, c.seed, ctx.sets.hard, c.env);
        ObjectiveOutcome outcome;
        outcome.curve = trained.curve;
        outcome.value = objective_from_training(
            trained.curve, trained.policy, ctx.sets.hard, c.train.eval_n,
            derive_seed(c.seed, "objective-eval"), c.env, c.train.divergence_floor);
        if (outcome.value > best_y) {
            best_y = outcome.value;
            save_policy(ctx.out / "best_policy.bin", trained.policy, ctx.digest);
            save_curriculum(ctx.out / "best_curriculum.json", cur);
        }
        return outcome;
    };

    TrialSink sink = [&](const SearchResult& partial) {
        const TrialRecord& last = partial.trials.back();
        write_curve_csv(ctx.out / ("curve_trial_" + std::to_string(last.index) + ".csv"),
                        last.curve);
        write_trials_csv(ctx.out / "trials.csv", partial);
        save_search_checkpoint(ctx.out / "search_checkpoint.json", partial, ctx.digest,
                               c.seed);
        std::cout << "trial " << last.index << " ("
                  << (last.phase == TrialPhase::warmup ? "warmup" : "bo") << ") x = [";
        for (Eigen::Index d = 0; d < last.x.size(); ++d) {
            std::cout << (d ? ", " : "") << last.x(d);
        }
        std::cout << "] y = " << last.objective << "\n";
    };

    const SearchResult result = run_search(c.search, objective, sink, std::move(resume));
    write_trials_csv(ctx.out / "trials.csv", result);
    save_search_checkpoint(ctx.out / "search_checkpoint.json", result, ctx.digest, c.seed);

    const TrialRecord& best = select_best_trial(result, SelectionMode::final);
    std::cout << "best trial " << best.index << " y = " << best.objective << "\n";
    const TrialRecord& best_curve = select_best_trial(result, SelectionMode::curve);
    std::cout << "best curve-peak trial " << best_curve.index << "\n";
    return 0;
}

int run_evaluate(const RunContext& ctx) {
    const RunConfig& c = ctx.config;
    if (c.checkpoint.empty()) {
        throw std::invalid_argument("evaluate: --checkpoint is required");
    }
    const PolicyCheckpoint ckpt = load_policy(c.checkpoint);
    const EvalSet& set = c.eval_set == "easy" ? ctx.sets.easy : ctx.sets.hard;
    const MetricsReport report =
        evaluate_policy(make_greedy_policy(ckpt.params), set, c.eval_n,
                        derive_seed(c.seed, "evaluate"), c.env);
    const std::string scheme = fs::path(c.checkpoint).stem().string();
    write_metrics_csv(ctx.out / "metrics.csv", scheme, set.name, report);
    std::cout << scheme << " on " << set.name << ": mean reward " << report.mean_reward
              << " +- " << report.std_reward << " over " << report.n_eval
              << " episodes\n";
    return 0;
}

int run_sweep(const RunContext& ctx) {
    const RunConfig& c = ctx.config;
    if (c.checkpoint.empty()) {
        throw std::invalid_argument("sweep: --checkpoint is required");
    }
    const PolicyCheckpoint ckpt = load_policy(c.checkpoint);
    const std::vector<BucketReport> buckets =
        difficulty_sweep(make_greedy_policy(ckpt.params), c.sweep_n,
                         derive_seed(c.seed, "sweep"), c.env);
    const std::string scheme = fs::path(c.checkpoint).stem().string();
    write_bucket_csv(ctx.out / "buckets.csv", scheme, buckets);
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        std::cout << "bucket " << i + 1 << " (kappa=" << buckets[i].params.kappa
                  << ", p=" << buckets[i].params.p << "): mean reward "
                  << buckets[i].report.mean_reward << "\n";
    }
    return 0;
}

}  // namespace

int run(const RunConfig& config) {
    const RunContext ctx = prepare(config);
    const std::string& mode = ctx.config.mode;
    if (mode == "train-default") return run_train(ctx, false);
    if (mode == "train-manual") return run_train(ctx, true);
    if (mode == "search-bo") return run_search_mode(ctx);
    if (mode == "evaluate") return run_evaluate(ctx);
    if (mode == "sweep") return run_sweep(ctx);
    throw std::invalid_argument(
        "unknown mode: " + mode +
        " (expected train-default|train-manual|search-bo|evaluate|sweep)");
}

}  // namespace raceline
