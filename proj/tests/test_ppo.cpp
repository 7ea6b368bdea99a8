#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "raceline/errors.hpp"
#include "raceline/eval.hpp"
#include "raceline/ppo.hpp"
#include "raceline/rng.hpp"

using namespace raceline;

namespace {

PolicyParams test_policy(int hidden = 8, std::uint64_t seed = 1) {
    return init_policy(hidden, seed);
}

// Batch whose observations/actions are drawn around the current policy so the
// ratios stay in a numerically honest range.
Batch random_batch(const PolicyParams& params, int n, std::uint64_t seed,
                   double logp_shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Batch batch;
    batch.obs.resize(n, kObservationDim);
    batch.actions.resize(n, kActionDim);
    batch.old_logp.resize(n);
    batch.advantages.resize(n);
    batch.returns.resize(n);
    for (int i = 0; i < n; ++i) {
        Observation obs;
        for (int d = 0; d < kObservationDim; ++d) obs(d) = 0.7 * normal(rng);
        batch.obs.row(i) = obs.transpose();
        const ForwardResult fw = forward(params, obs);
        Eigen::VectorXd u(kActionDim);
        for (int a = 0; a < kActionDim; ++a) {
            u(a) = fw.action_mean(a) + std::exp(params.log_std(a)) * normal(rng);
        }
        batch.actions.row(i) = u.transpose();
        batch.old_logp(i) = gaussian_log_prob(params, fw.action_mean, u) + logp_shift;
        batch.advantages(i) = normal(rng);
        batch.returns(i) = fw.value + normal(rng);
    }
    return batch;
}

Eigen::VectorXd fd_gradient(const Batch& batch, const PolicyParams& params,
                            double clip, double vc, double ec, double h = 1e-5) {
    const Eigen::VectorXd theta = params.flatten();
    Eigen::VectorXd grad(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Eigen::VectorXd up = theta, dn = theta;
        up(i) += h;
        dn(i) -= h;
        const double fu = clipped_surrogate_loss(
                              batch, PolicyParams::unflatten(up, params.hidden()), clip,
                              vc, ec)
                              .loss;
        const double fd = clipped_surrogate_loss(
                              batch, PolicyParams::unflatten(dn, params.hidden()), clip,
                              vc, ec)
                              .loss;
        grad(i) = (fu - fd) / (2.0 * h);
    }
    return grad;
}

}  // namespace

TEST_CASE("unit ratios reduce the policy term to minus the mean advantage") {
    const PolicyParams params = test_policy();
    const Batch batch = random_batch(params, 32, 5);
    const LossResult r = clipped_surrogate_loss(batch, params, 0.2);
    CHECK(r.policy_term ==
          doctest::Approx(-batch.advantages.mean()).epsilon(1e-10));
}

TEST_CASE("ratios beyond the clip boundary use the clipped surrogate") {
    const PolicyParams params = test_policy();
    const double eps = 0.2;
    Batch batch = random_batch(params, 1, 6);
    batch.advantages(0) = 1.5;
    // shift the stored old log-prob so r = 1 + 2 eps exactly
    batch.old_logp(0) -= std::log(1.0 + 2.0 * eps);
    const LossResult r = clipped_surrogate_loss(batch, params, eps, 0.0, 0.0);
    CHECK(r.policy_term == doctest::Approx(-(1.0 + eps) * 1.5).epsilon(1e-10));
    // the clipped branch is flat: no policy gradient flows into the actor head
    const Batch clean = batch;
    PolicyParams nudged = params;
    nudged.b_act(0) += 1e-4;
    const LossResult r2 = clipped_surrogate_loss(clean, nudged, eps, 0.0, 0.0);
    CHECK(r2.policy_term == doctest::Approx(r.policy_term).epsilon(1e-6));
}

TEST_CASE("loss gradient matches central finite differences") {
    const PolicyParams params = test_policy(6, 21);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Batch batch = random_batch(params, 16, 100 + seed, seed % 2 ? 0.1 : -0.1);
        const LossResult r = clipped_surrogate_loss(batch, params, 0.2, 0.5, 0.01);
        const Eigen::VectorXd fd = fd_gradient(batch, params, 0.2, 0.5, 0.01);
        CHECK((r.grad - fd).norm() <= 1e-4 * (fd.norm() + 1e-8));
    }
}

TEST_CASE("non-finite advantages surface as a numerical failure") {
    const PolicyParams params = test_policy();
    Batch batch = random_batch(params, 4, 9);
    batch.advantages(2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(clipped_surrogate_loss(batch, params, 0.2), NumericalError);
}

TEST_CASE("advantage normalization is idempotent on standardized data") {
    Eigen::VectorXd adv(6);
    adv << -1.2, 0.3, 1.4, -0.6, 0.9, -0.8;
    normalize_advantages(adv);
    Eigen::VectorXd again = adv;
    normalize_advantages(again);
    CHECK((adv - again).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK(std::abs(adv.mean()) <= 1e-12);

    // the argmin over a scalar parameter is unchanged by renormalization:
    // scan the actor bias of a single-transition family
    const PolicyParams params = test_policy(4, 3);
    Batch batch = random_batch(params, 8, 44);
    normalize_advantages(batch.advantages);
    Batch renormed = batch;
    normalize_advantages(renormed.advantages);
    double best_a = 0.0, best_b = 0.0, fa = 1e300, fb = 1e300;
    for (double delta = -0.5; delta <= 0.5; delta += 0.01) {
        PolicyParams p = params;
        p.b_act(0) += delta;
        const double la = clipped_surrogate_loss(batch, p, 0.2, 0.0, 0.0).loss;
        const double lb = clipped_surrogate_loss(renormed, p, 0.2, 0.0, 0.0).loss;
        if (la < fa) { fa = la; best_a = delta; }
        if (lb < fb) { fb = lb; best_b = delta; }
    }
    CHECK(best_a == doctest::Approx(best_b).epsilon(1e-12));
}

TEST_CASE("policy parameters survive a flatten round trip") {
    const PolicyParams params = test_policy(10, 77);
    const PolicyParams back = PolicyParams::unflatten(params.flatten(), 10);
    CHECK((params.w1 - back.w1).norm() == 0.0);
    CHECK((params.b_act - back.b_act).norm() == 0.0);
    CHECK(params.b_val == back.b_val);
    CHECK((params.log_std - back.log_std).norm() == 0.0);
}

namespace {

TrainConfig toy_train_config(int epochs = 12) {
    TrainConfig c;
    c.total_epochs = epochs;
    c.batch_size = 96;
    c.hidden = 8;
    c.eval_every = 6;
    c.eval_n = 2;
    c.max_episode_steps = 80;
    return c;
}

EnvConfig toy_env() {
    EnvConfig e;
    e.n_tiles_base = 60;
    e.max_steps = 120;
    return e;
}

}  // namespace

TEST_CASE("training improves the reward on a short constant-curriculum run") {
    TrainConfig config = toy_train_config(50);
    config.batch_size = 192;
    config.max_episode_steps = 120;
    const Curriculum curriculum = constant_curriculum({0.31, 0.05}, 50);
    const EvalSets sets = build_sets(EnvMode::kp);
    const TrainResult result = train(curriculum, config, 0, sets.hard, toy_env());
    REQUIRE(!result.curve.diverged);
    REQUIRE(result.curve.train_rewards.size() == 50);

    double first = 0.0, last = 0.0;
    for (int i = 0; i < 10; ++i) {
        first += result.curve.train_rewards[static_cast<std::size_t>(i)];
        last += result.curve.train_rewards[static_cast<std::size_t>(40 + i)];
    }
    CHECK(last / 10.0 > first / 10.0);
}

TEST_CASE("the recorded schedule equals the curriculum mapping") {
    const PsiLadder ladder = default_ladder(EnvMode::kp);
    const Curriculum curriculum =
        make_curriculum(Eigen::Vector3d(2.0, 5.0, 8.0), ladder, 12);
    const TrainConfig config = toy_train_config(12);
    const EvalSets sets = build_sets(EnvMode::kp);
    const TrainResult result = train(curriculum, config, 3, sets.hard, toy_env());
    REQUIRE(result.curve.psi_schedule.size() == 12);
    for (int e = 0; e < 12; ++e) {
        CHECK(result.curve.psi_schedule[static_cast<std::size_t>(e)] ==
              param_at(curriculum, e));
    }
    // switches land exactly on the configured epochs
    CHECK(result.curve.psi_schedule[2] == ladder[0]);
    CHECK(result.curve.psi_schedule[3] == ladder[1]);
    CHECK(result.curve.psi_schedule[6] == ladder[2]);
    CHECK(result.curve.psi_schedule[9] == ladder[3]);
}

TEST_CASE("training is deterministic under a fixed seed") {
    const Curriculum curriculum = constant_curriculum({0.31, 0.05}, 6);
    const TrainConfig config = toy_train_config(6);
    const EvalSets sets = build_sets(EnvMode::kp);
    const TrainResult a = train(curriculum, config, 11, sets.hard, toy_env());
    const TrainResult b = train(curriculum, config, 11, sets.hard, toy_env());
    CHECK(a.curve.train_rewards == b.curve.train_rewards);
    REQUIRE(a.curve.evals.size() == b.curve.evals.size());
    for (std::size_t i = 0; i < a.curve.evals.size(); ++i) {
        CHECK(a.curve.evals[i].mean_reward == b.curve.evals[i].mean_reward);
    }
    CHECK((a.policy.flatten() - b.policy.flatten()).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("evaluation cadence follows eval_every") {
    const Curriculum curriculum = constant_curriculum({0.31, 0.05}, 13);
    TrainConfig config = toy_train_config(13);
    config.eval_every = 5;
    const EvalSets sets = build_sets(EnvMode::kp);
    const TrainResult result = train(curriculum, config, 2, sets.hard, toy_env());
    REQUIRE(result.curve.evals.size() == 3);
    CHECK(result.curve.evals[0].epoch == 0);
    CHECK(result.curve.evals[1].epoch == 5);
    CHECK(result.curve.evals[2].epoch == 10);
}

TEST_CASE("objective evaluation is deterministic and floors diverged runs") {
    const Curriculum curriculum = constant_curriculum({0.31, 0.05}, 4);
    const TrainConfig config = toy_train_config(4);
    const EvalSets sets = build_sets(EnvMode::kp);
    const TrainResult result = train(curriculum, config, 5, sets.hard, toy_env());

    const double y1 = objective_from_training(result.curve, result.policy, sets.hard, 3,
                                              99, toy_env());
    const double y2 = objective_from_training(result.curve, result.policy, sets.hard, 3,
                                              99, toy_env());
    CHECK(y1 == y2);

    TrainingCurve diverged = result.curve;
    diverged.diverged = true;
    CHECK(objective_from_training(diverged, result.policy, sets.hard, 3, 99,
                                  toy_env()) == -1000.0);
}

TEST_CASE("train config validation rejects bad fields") {
    TrainConfig c = toy_train_config();
    c.clip_epsilon = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = toy_train_config();
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    const Curriculum curriculum = constant_curriculum({0.31, 0.05}, 99);
    const EvalSets sets = build_sets(EnvMode::kp);
    CHECK_THROWS_AS(train(curriculum, toy_train_config(12), 0, sets.hard, toy_env()),
                    std::invalid_argument);
}
