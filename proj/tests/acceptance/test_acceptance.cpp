// Acceptance suite: one case per release criterion, each printing a
// [PASS]/[FAIL] line with its runtime so the whole gate is auditable from the
// test log.
#include <doctest.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "raceline/bo_search.hpp"
#include "raceline/boxopt.hpp"
#include "raceline/curriculum.hpp"
#include "raceline/eval.hpp"
#include "raceline/gp.hpp"
#include "raceline/kernel.hpp"
#include "raceline/ppo.hpp"
#include "raceline/race_env.hpp"
#include "raceline/rng.hpp"
#include "raceline/run.hpp"

using namespace raceline;

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(const char* name, bool ok, double seconds, double limit) {
    std::printf("[%s] %-34s %7.2fs (limit %gs)\n", ok ? "PASS" : "FAIL", name, seconds,
                limit);
    std::fflush(stdout);
    CHECK_MESSAGE(ok, name);
    CHECK_MESSAGE(seconds < limit, name << " runtime");
}

KernelParams paper_kernel(double noise = 0.01) {
    KernelParams k;
    k.length_scales = Eigen::Vector3d(19.9, 26.5, 21.15);
    k.signal_variance = 1.0;
    k.noise_variance = noise;
    return k;
}

Box paper_box() {
    Box box;
    box.lower = Eigen::Vector3d(150.0, 330.0, 730.0);
    box.upper = Eigen::Vector3d(250.0, 450.0, 830.0);
    return box;
}

Eigen::VectorXd random_box_point(const Box& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd x(box.dim());
    for (int d = 0; d < box.dim(); ++d) {
        x(d) = box.lower(d) + u(rng) * (box.upper(d) - box.lower(d));
    }
    return x;
}

// Direct-inversion posterior, standardization included; shares no code with
// the Cholesky path it checks.
std::pair<double, double> dense_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const KernelParams& kernel, double prior_raw,
                                       const Eigen::VectorXd& q) {
    const Eigen::Index n = y.size();
    const double mean = y.mean();
    double sd = 1.0;
    if (n >= 2) {
        sd = std::sqrt((y.array() - mean).square().sum() / static_cast<double>(n - 1));
        if (sd == 0.0) sd = 1.0;
    }
    const double mu0 = (prior_raw - mean) / sd;
    const Eigen::VectorXd z = (y.array() - mean).matrix() / sd;
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            K(i, j) = matern52(X.row(i).transpose(), X.row(j).transpose(), kernel);
        }
    }
    K.diagonal().array() += kernel.noise_variance;
    const Eigen::MatrixXd Kinv = K.inverse();
    Eigen::VectorXd ks(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ks(i) = matern52(X.row(i).transpose(), q, kernel);
    }
    const Eigen::VectorXd centered = z.array() - mu0;
    const double mu = mu0 + ks.dot(Kinv * centered);
    const double var = std::max(kernel.signal_variance - ks.dot(Kinv * ks), 0.0);
    return {mean + sd * mu, sd * std::sqrt(var)};
}

}  // namespace

TEST_CASE("gp oracle equivalence") {
    Stopwatch timer;
    bool ok = true;
    std::mt19937_64 rng(1001);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 10);
    const Box box = paper_box();
    const KernelParams kernel = paper_kernel();
    for (int rep = 0; rep < 50; ++rep) {
        const int n = size(rng);
        Eigen::MatrixXd X(n, 3);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            X.row(i) = random_box_point(box, rng).transpose();
            y(i) = 400.0 + 180.0 * normal(rng);
        }
        const double prior = 50.0 * normal(rng);
        const GpModel model = fit_gp(X, y, kernel, prior);
        for (int q = 0; q < 8; ++q) {
            const Eigen::VectorXd query = random_box_point(box, rng);
            const Posterior post = posterior(model, query);
            const auto [om, os] = dense_oracle(X, y, kernel, prior, query);
            ok &= std::abs(post.mean - om) <= 1e-8 * std::max(1.0, std::abs(om));
            ok &= std::abs(post.std - os) <= 1e-8 * std::max(1.0, os);
        }
    }
    report("gp-oracle-equivalence", ok, timer.seconds(), 5.0);
}

TEST_CASE("kernel unit suite") {
    Stopwatch timer;
    bool ok = true;
    const KernelParams kernel = paper_kernel();
    const Box box = paper_box();
    std::mt19937_64 rng(1002);

    // identity: k(x, x) equals the signal variance
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::VectorXd x = random_box_point(box, rng);
        ok &= std::abs(matern52(x, x, kernel) - kernel.signal_variance) < 1e-14;
    }
    // symmetry
    for (int rep = 0; rep < 100; ++rep) {
        const Eigen::VectorXd a = random_box_point(box, rng);
        const Eigen::VectorXd b = random_box_point(box, rng);
        ok &= matern52(a, b, kernel) == matern52(b, a, kernel);
    }
    // positive semidefiniteness of gram matrices up to 20 points
    for (int n : {5, 10, 20}) {
        Eigen::MatrixXd X(n, 3);
        for (int i = 0; i < n; ++i) X.row(i) = random_box_point(box, rng).transpose();
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_matrix(X, kernel));
        ok &= es.eigenvalues().minCoeff() >= -1e-8;
    }
    // frozen closed-form value
    ok &= std::abs(matern52(Eigen::Vector3d(150, 330, 730), Eigen::Vector3d(250, 450, 830),
                            kernel) -
                   1.2857216956570295e-06) < 1e-12;
    report("kernel-unit-suite", ok, timer.seconds(), 1.0);
}

TEST_CASE("optimizer suite") {
    Stopwatch timer;
    bool ok = true;
    const Box box = paper_box();
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (int rep = 0; rep < 20; ++rep) {
        // half the centers interior, half forced outside to activate bounds
        Eigen::Vector3d center;
        for (int d = 0; d < 3; ++d) {
            const double span = box.upper(d) - box.lower(d);
            center(d) = rep % 2 == 0 ? box.lower(d) + span * u(rng)
                                     : box.lower(d) - 0.5 * span + 2.0 * span * u(rng);
        }
        std::vector<Eigen::VectorXd> iterates;
        std::vector<double> values;
        GradObjective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
            grad = 2.0 * (x - center);
            iterates.push_back(x);
            values.push_back((x - center).squaredNorm());
            return values.back();
        };
        Eigen::Vector3d x0;
        for (int d = 0; d < 3; ++d) {
            x0(d) = box.lower(d) + (box.upper(d) - box.lower(d)) * u(rng);
        }
        const OptResult r = minimize(objective, box, x0);
        const Eigen::VectorXd expected = box.clamp(center);
        ok &= (r.x - expected).lpNorm<Eigen::Infinity>() <= 1e-6;
        for (const Eigen::VectorXd& p : iterates) ok &= box.contains(p);
        double best = values.front();
        for (const double v : values) best = std::min(best, v);
        ok &= r.f <= values.front();
        ok &= std::abs(r.f - best) <= 1e-12 * std::max(1.0, std::abs(best));
    }

    GradObjective rosenbrock = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const double a = 1.0 - x(0);
        const double b = x(1) - x(0) * x(0);
        grad.resize(2);
        grad(0) = -2.0 * a - 400.0 * x(0) * b;
        grad(1) = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    Box square;
    square.lower = Eigen::Vector2d(-2.0, -2.0);
    square.upper = Eigen::Vector2d(2.0, 2.0);
    const OptResult r = minimize(rosenbrock, square, Eigen::Vector2d(-1.2, 1.0));
    ok &= (r.x - Eigen::Vector2d(1.0, 1.0)).lpNorm<Eigen::Infinity>() <= 1e-4;
    ok &= r.f <= 1e-8;

    report("optimizer-suite", ok, timer.seconds(), 10.0);
}

TEST_CASE("acquisition maximization beats the grid") {
    Stopwatch timer;
    bool ok = true;
    SearchConfig config;
    config.bounds = paper_box();
    config.kernel = paper_kernel();
    config.lambda_ucb = 1.9;
    config.ladder = default_ladder(EnvMode::kp);
    std::mt19937_64 rng(1004);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> size(2, 10);

    for (int rep = 0; rep < 20; ++rep) {
        const int n = size(rng);
        Eigen::MatrixXd X(n, 3);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            X.row(i) = random_box_point(config.bounds, rng).transpose();
            y(i) = 350.0 + 200.0 * normal(rng);
        }
        const GpModel model = fit_gp(X, y, config.kernel, 0.0);
        config.master_seed = 5000 + static_cast<std::uint64_t>(rep);
        const Proposal proposal = propose_next(model, config, 0);
        ok &= config.bounds.contains(proposal.x, 1e-9);

        double grid_best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 21; ++i) {
            for (int j = 0; j < 21; ++j) {
                for (int k = 0; k < 21; ++k) {
                    Eigen::Vector3d g;
                    g << config.bounds.lower(0) + 100.0 * i / 20.0,
                        config.bounds.lower(1) + 120.0 * j / 20.0,
                        config.bounds.lower(2) + 100.0 * k / 20.0;
                    grid_best = std::max(grid_best, ucb(model, g, config.lambda_ucb));
                }
            }
        }
        ok &= ucb(model, proposal.x, config.lambda_ucb) >=
              grid_best - 1e-3 * model.target_std;
    }
    report("acquisition-maximization", ok, timer.seconds(), 30.0);
}

TEST_CASE("ppo gradient check") {
    Stopwatch timer;
    bool ok = true;
    std::mt19937_64 rng(1005);
    std::normal_distribution<double> normal(0.0, 1.0);
    const PolicyParams params = init_policy(6, 12);

    for (int rep = 0; rep < 50; ++rep) {
        const int n = 12;
        Batch batch;
        batch.obs.resize(n, kObservationDim);
        batch.actions.resize(n, kActionDim);
        batch.old_logp.resize(n);
        batch.advantages.resize(n);
        batch.returns.resize(n);
        for (int i = 0; i < n; ++i) {
            Observation obs;
            for (int d = 0; d < kObservationDim; ++d) obs(d) = 0.6 * normal(rng);
            batch.obs.row(i) = obs.transpose();
            const ForwardResult fw = forward(params, obs);
            Eigen::VectorXd u(kActionDim);
            for (int a = 0; a < kActionDim; ++a) {
                u(a) = fw.action_mean(a) + std::exp(params.log_std(a)) * normal(rng);
            }
            batch.actions.row(i) = u.transpose();
            batch.old_logp(i) =
                gaussian_log_prob(params, fw.action_mean, u) + 0.15 * normal(rng);
            batch.advantages(i) = normal(rng);
            batch.returns(i) = fw.value + normal(rng);
        }
        const LossResult loss = clipped_surrogate_loss(batch, params, 0.2, 0.5, 0.01);

        const Eigen::VectorXd theta = params.flatten();
        Eigen::VectorXd fd(theta.size());
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            Eigen::VectorXd up = theta, dn = theta;
            up(i) += h;
            dn(i) -= h;
            const double fu =
                clipped_surrogate_loss(batch, PolicyParams::unflatten(up, 6), 0.2, 0.5,
                                       0.01)
                    .loss;
            const double fl =
                clipped_surrogate_loss(batch, PolicyParams::unflatten(dn, 6), 0.2, 0.5,
                                       0.01)
                    .loss;
            fd(i) = (fu - fl) / (2.0 * h);
        }
        ok &= (loss.grad - fd).norm() <= 1e-4 * (fd.norm() + 1e-8);
    }
    report("ppo-gradient-check", ok, timer.seconds(), 30.0);
}

TEST_CASE("environment reward ledger") {
    Stopwatch timer;
    bool ok = true;
    EnvConfig env;
    env.n_tiles_base = 100;
    env.max_steps = 400;
    std::mt19937_64 rng(1006);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (int rep = 0; rep < 1000; ++rep) {
        const EnvParams params{0.31 + 0.4 * u(rng), 0.13 * u(rng)};
        const Track track = generate_track(params, rng(), env);
        Policy noisy = [&env](const Observation& obs, std::mt19937_64& prng) {
            Action a = reference_policy(env)(obs, prng);
            std::uniform_real_distribution<double> d(-1.0, 1.0);
            a.steering = std::clamp(a.steering + 0.5 * d(prng), -1.0, 1.0);
            a.accel = std::clamp(a.accel + 0.5 * d(prng), 0.0, 1.0);
            a.brake = std::clamp(a.brake + 0.2 * d(prng), 0.0, 1.0);
            return a;
        };
        const EpisodeMetrics m = run_episode(track, noisy, rng(), 250);
        const double ledger = -0.1 * m.steps + track.tile_reward() * m.tiles_visited -
                              50.0 * m.collisions;
        ok &= m.total_reward == doctest::Approx(ledger).epsilon(1e-12);
    }

    // clean full laps pay out exactly the total tile purse minus time
    int laps = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Track track = generate_track({0.31, 0.0}, seed, env);
        const EpisodeMetrics m = run_episode(track, reference_policy(env), seed, 2000);
        if (m.lap_complete && m.collisions == 0) {
            ++laps;
            ok &= std::abs(m.total_reward - (1000.0 - 0.1 * m.steps)) < 1e-9;
        }
    }
    ok &= laps >= 8;
    report("environment-ledger", ok, timer.seconds(), 30.0);
}

TEST_CASE("curriculum fixtures and proposal bounds") {
    Stopwatch timer;
    bool ok = true;
    const PsiLadder ladder = default_ladder(EnvMode::kp);

    struct Fixture {
        Eigen::Vector3d ends;
        std::vector<int> switches;
    };
    const std::vector<Fixture> fixtures = {
        {{160.0, 417.0, 736.0}, {161, 418, 737}},   // searched schedule
        {{197.0, 395.0, 774.0}, {198, 396, 775}},   // manual schedule
    };
    for (const Fixture& fx : fixtures) {
        const Curriculum c = make_curriculum(fx.ends, ladder, 1000);
        ok &= c.switch_epochs == fx.switches;
        for (int epoch = 0; epoch < 1000; ++epoch) {
            std::size_t segment = 0;
            while (segment < fx.switches.size() &&
                   epoch >= fx.switches[segment]) {
                ++segment;
            }
            ok &= param_at(c, epoch) == ladder[segment];
        }
    }

    // every proposal of a short search stays inside the box, pre- and
    // post-rounding
    SearchConfig config;
    config.bounds = paper_box();
    config.kernel = paper_kernel();
    config.ladder = ladder;
    config.n_warmup = 2;
    config.n_iterations = 3;
    config.master_seed = 77;
    SearchObjective objective = [](const Eigen::VectorXd& x, const Curriculum&) {
        return ObjectiveOutcome{-((x.array() - 200.0) / 100.0).square().sum(), {}};
    };
    const SearchResult result = run_search(config, objective);
    for (const TrialRecord& t : result.trials) {
        ok &= config.bounds.contains(t.x, 1e-9);
        ok &= t.curriculum_valid;
        for (std::size_t i = 0; i < t.curriculum.switch_epochs.size(); ++i) {
            const double rounded = t.curriculum.switch_epochs[i] - 1.0;
            ok &= rounded >= config.bounds.lower(static_cast<Eigen::Index>(i)) - 0.5;
            ok &= rounded <= config.bounds.upper(static_cast<Eigen::Index>(i)) + 0.5;
        }
    }
    report("curriculum-fixtures", ok, timer.seconds(), 1.0);
}

TEST_CASE("synthetic end-to-end search") {
    Stopwatch timer;
    bool ok = true;
    int hits = 0;
    const Eigen::Vector3d c(200.0, 390.0, 780.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SearchConfig config;
        config.bounds = paper_box();
        config.kernel = paper_kernel();
        config.ladder = default_ladder(EnvMode::kp);
        config.n_warmup = 5;
        config.n_iterations = 10;
        config.master_seed = seed;
        SearchObjective objective = [&](const Eigen::VectorXd& x, const Curriculum&) {
            return ObjectiveOutcome{-((x - c).array() / 100.0).square().sum(), {}};
        };
        const SearchResult result = run_search(config, objective);
        const TrialRecord& best = select_best_trial(result, SelectionMode::final);
        bool within = true;
        for (int d = 0; d < 3; ++d) within &= std::abs(best.x(d) - c(d)) <= 15.0;
        hits += within ? 1 : 0;
        ok &= static_cast<int>(result.trials.size()) == 15;
    }
    ok &= hits >= 9;
    std::printf("        synthetic optimum located in %d/10 seeds\n", hits);
    report("synthetic-bo-end-to-end", ok, timer.seconds(), 10.0);
}

TEST_CASE("desk-scale directional reproduction") {
    Stopwatch timer;
    const RunConfig desk = default_config("desk");
    const PsiLadder ladder = default_ladder(EnvMode::kp);
    const EvalSets sets = build_sets(EnvMode::kp);
    const int kEvalN = desk.final_eval_n;

    std::vector<double> r_default, r_manual, r_bo;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const std::uint64_t eval_seed = derive_seed(seed, "acceptance-final-eval");

        TrainConfig default_cfg = desk.train;
        default_cfg.learning_rate = desk.learning_rate_default;
        const TrainResult trained_default =
            train(constant_curriculum(ladder.front(), desk.train.total_epochs),
                  default_cfg, seed, sets.hard, desk.env);
        r_default.push_back(evaluate_policy(make_greedy_policy(trained_default.policy),
                                            sets.hard, kEvalN, eval_seed, desk.env)
                                .mean_reward);

        const Curriculum manual = make_curriculum(
            Eigen::Map<const Eigen::VectorXd>(desk.manual_ends.data(), 3), ladder,
            desk.train.total_epochs);
        const TrainResult trained_manual =
            train(manual, desk.train, seed, sets.hard, desk.env);
        r_manual.push_back(evaluate_policy(make_greedy_policy(trained_manual.policy),
                                           sets.hard, kEvalN, eval_seed, desk.env)
                               .mean_reward);

        SearchConfig search = desk.search;
        search.ladder = ladder;
        search.max_epoch = desk.train.total_epochs;
        search.master_seed = seed;
        PolicyParams best_policy;
        double best_y = -std::numeric_limits<double>::infinity();
        SearchObjective objective = [&](const Eigen::VectorXd&, const Curriculum& cur) {
            const TrainResult trained = train(cur, desk.train, seed, sets.hard, desk.env);
            ObjectiveOutcome out;
            out.curve = trained.curve;
            out.value = objective_from_training(trained.curve, trained.policy, sets.hard,
                                                desk.train.eval_n,
                                                derive_seed(seed, "objective-eval"),
                                                desk.env);
            if (out.value > best_y) {
                best_y = out.value;
                best_policy = trained.policy;
            }
            return out;
        };
        run_search(search, objective);
        r_bo.push_back(evaluate_policy(make_greedy_policy(best_policy), sets.hard, kEvalN,
                                       eval_seed, desk.env)
                           .mean_reward);
        std::printf("        seed %llu: default %.1f, manual %.1f, bo %.1f\n",
                    static_cast<unsigned long long>(seed), r_default.back(),
                    r_manual.back(), r_bo.back());
        std::fflush(stdout);
    }

    auto paired_stats = [](const std::vector<double>& a, const std::vector<double>& b) {
        const std::size_t n = a.size();
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = a[i] - b[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n - 1);
        return std::pair<double, double>(mean, std::sqrt(var / static_cast<double>(n)));
    };

    const auto [gain_manual, se_manual] = paired_stats(r_manual, r_default);
    const auto [gain_bo, se_bo] = paired_stats(r_bo, r_manual);
    std::printf("        manual - default: %.1f (se %.1f); bo - manual: %.1f (se %.1f)\n",
                gain_manual, se_manual, gain_bo, se_bo);

    bool ok = gain_manual > se_manual;  // curriculum beats default beyond one SE
    ok &= gain_bo >= -se_bo;            // searched curriculum not behind manual
    report("desk-directional-reproduction", ok, timer.seconds(), 1800.0);
}

TEST_CASE("pipeline determinism") {
    Stopwatch timer;
    bool ok = true;

    EnvConfig env;
    env.n_tiles_base = 80;
    env.max_steps = 300;

    // track generation and episodes
    const Track t1 = generate_track({0.41, 0.07}, 9, env);
    const Track t2 = generate_track({0.41, 0.07}, 9, env);
    ok &= t1.n_tiles() == t2.n_tiles();
    for (int i = 0; i < t1.n_tiles(); ++i) {
        ok &= t1.tiles[i].curvature == t2.tiles[i].curvature;
        ok &= t1.tiles[i].has_obstacle == t2.tiles[i].has_obstacle;
        ok &= t1.tiles[i].obstacle_offset == t2.tiles[i].obstacle_offset;
    }
    ok &= run_episode(t1, reference_policy(env), 4) == run_episode(t2, reference_policy(env), 4);

    // gp fit and posterior
    Eigen::MatrixXd X(4, 3);
    X << 160, 340, 740, 200, 400, 780, 240, 440, 820, 175, 425, 755;
    Eigen::VectorXd y(4);
    y << 10.0, 40.0, 20.0, 35.0;
    const GpModel m1 = fit_gp(X, y, paper_kernel(), 0.0);
    const GpModel m2 = fit_gp(X, y, paper_kernel(), 0.0);
    const Eigen::Vector3d q(222.0, 333.0, 777.0);
    ok &= posterior(m1, q).mean == posterior(m2, q).mean;
    ok &= posterior(m1, q).std == posterior(m2, q).std;

    // acquisition proposal
    SearchConfig sc;
    sc.bounds = paper_box();
    sc.kernel = paper_kernel();
    sc.ladder = default_ladder(EnvMode::kp);
    sc.master_seed = 3;
    ok &= (propose_next(m1, sc, 1).x - propose_next(m2, sc, 1).x).norm() == 0.0;

    // training
    TrainConfig tc;
    tc.total_epochs = 5;
    tc.batch_size = 64;
    tc.hidden = 8;
    tc.eval_every = 2;
    tc.eval_n = 2;
    tc.max_episode_steps = 60;
    const EvalSets sets = build_sets(EnvMode::kp);
    const Curriculum cur = constant_curriculum({0.31, 0.05}, 5);
    const TrainResult tr1 = train(cur, tc, 21, sets.hard, env);
    const TrainResult tr2 = train(cur, tc, 21, sets.hard, env);
    ok &= (tr1.policy.flatten() - tr2.policy.flatten()).lpNorm<Eigen::Infinity>() == 0.0;
    ok &= tr1.curve.train_rewards == tr2.curve.train_rewards;

    // evaluation
    const MetricsReport e1 =
        evaluate_policy(make_greedy_policy(tr1.policy), sets.hard, 10, 6, env);
    const MetricsReport e2 =
        evaluate_policy(make_greedy_policy(tr2.policy), sets.hard, 10, 6, env);
    ok &= e1.mean_reward == e2.mean_reward && e1.std_reward == e2.std_reward;

    // full synthetic search
    SearchConfig sc2 = sc;
    sc2.n_warmup = 3;
    sc2.n_iterations = 2;
    SearchObjective objective = [](const Eigen::VectorXd& x, const Curriculum&) {
        return ObjectiveOutcome{-((x.array() - 200.0) / 50.0).square().sum(), {}};
    };
    const SearchResult s1 = run_search(sc2, objective);
    const SearchResult s2 = run_search(sc2, objective);
    for (std::size_t i = 0; i < s1.trials.size(); ++i) {
        ok &= (s1.trials[i].x - s2.trials[i].x).norm() == 0.0;
        ok &= s1.trials[i].objective == s2.trials[i].objective;
    }

    report("pipeline-determinism", ok, timer.seconds(), 300.0);
}
