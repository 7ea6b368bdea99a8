#include "raceline/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "raceline/errors.hpp"
#include "raceline/rng.hpp"

namespace raceline {

void TrainConfig::validate() const {
    if (learning_rate <= 0.0 || update_epochs <= 0 || batch_size <= 0 ||
        total_epochs <= 0 || gamma <= 0.0 || gae_lambda <= 0.0 || eval_every <= 0 ||
        eval_n <= 0 || hidden <= 0 || value_coeff < 0.0 || entropy_coeff < 0.0 ||
        max_episode_steps <= 0) {
        throw std::invalid_argument("TrainConfig: fields must be positive");
    }
    if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
        throw std::invalid_argument("TrainConfig: clip_epsilon must be in (0, 1)");
    }
}

void normalize_advantages(Eigen::VectorXd& advantages) {
    const double n = static_cast<double>(advantages.size());
    if (n < 1) return;
    const double mean = advantages.mean();
    const double var = (advantages.array() - mean).square().sum() / n;
    advantages = (advantages.array() - mean) / (std::sqrt(var) + 1e-8);
}

LossResult clipped_surrogate_loss(const Batch& batch, const PolicyParams& params,
                                  double clip_epsilon, double value_coeff,
                                  double entropy_coeff) {
    const int n = batch.size();
    if (n < 1) {
        throw std::invalid_argument("clipped_surrogate_loss: empty batch");
    }
    const double inv_n = 1.0 / n;

    // Forward for the whole batch: columns are transitions.
    const Eigen::MatrixXd h =
        ((params.w1 * batch.obs.transpose()).colwise() + params.b1).array().tanh();
    const Eigen::MatrixXd mu = (params.w_act * h).colwise() + params.b_act;
    const Eigen::VectorXd values =
        (params.w_val * h).transpose().array() + params.b_val;

    const Eigen::ArrayXd sigma = params.log_std.array().exp();
    const Eigen::ArrayXXd z =
        (batch.actions.transpose() - mu).array().colwise() / sigma;
    const Eigen::VectorXd logp =
        (-0.5 * z.square().colwise().sum()).transpose().matrix() -
        Eigen::VectorXd::Constant(
            n, params.log_std.sum() +
                   0.5 * kActionDim * std::log(2.0 * std::numbers::pi));
    const Eigen::ArrayXd ratio = (logp - batch.old_logp).array().exp();

    LossResult result;
    Eigen::VectorXd coeff(n);  // d loss / d logp per transition
    for (int i = 0; i < n; ++i) {
        const double a = batch.advantages(i);
        const double r = ratio(i);
        const double rc = std::clamp(r, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
        const double surr1 = r * a;
        const double surr2 = rc * a;
        result.policy_term += -std::min(surr1, surr2) * inv_n;
        // Gradient flows through the unclipped branch only; the clipped branch
        // is active exactly when the ratio sits outside the clip interval.
        coeff(i) = surr1 <= surr2 ? -a * inv_n * r : 0.0;
    }

    const Eigen::VectorXd value_err = values - batch.returns;
    result.value_term = value_err.squaredNorm() * inv_n;
    result.entropy =
        params.log_std.sum() +
        0.5 * kActionDim * (1.0 + std::log(2.0 * std::numbers::pi));
    result.loss = result.policy_term + value_coeff * result.value_term -
                  entropy_coeff * result.entropy;
    if (!std::isfinite(result.loss)) {
        std::ostringstream oss;
        oss << "clipped_surrogate_loss: non-finite loss (n=" << n
            << ", max|ratio|=" << ratio.abs().maxCoeff()
            << ", max|adv|=" << batch.advantages.array().abs().maxCoeff() << ")";
        throw NumericalError(oss.str());
    }

    // Backward pass.
    // d logp / d mu_a = z_a / sigma_a, d logp / d log_std_a = z_a^2 - 1.
    const Eigen::MatrixXd g_mu =
        ((z.colwise() / sigma).rowwise() * coeff.transpose().array()).matrix();
    const Eigen::VectorXd g_v = 2.0 * value_coeff * inv_n * value_err;

    PolicyParams grads;
    grads.w_act = g_mu * h.transpose();
    grads.b_act = g_mu.rowwise().sum();
    grads.w_val = (h * g_v).transpose();
    grads.b_val = g_v.sum();

    const Eigen::MatrixXd dh =
        params.w_act.transpose() * g_mu + params.w_val.transpose() * g_v.transpose();
    const Eigen::MatrixXd dz1 = (dh.array() * (1.0 - h.array().square())).matrix();
    grads.w1 = dz1 * batch.obs;
    grads.b1 = dz1.rowwise().sum();

    grads.log_std = ((z.square() - 1.0).matrix() * coeff) -
                    Eigen::VectorXd::Constant(kActionDim, entropy_coeff);

    result.grad = grads.flatten();
    if (!result.grad.allFinite()) {
        throw NumericalError("clipped_surrogate_loss: non-finite gradient");
    }
    return result;
}

namespace {

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    int t = 0;

    explicit AdamState(Eigen::Index n)
        : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

    void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double lr) {
        constexpr double beta1 = 0.9;
        constexpr double beta2 = 0.999;
        constexpr double eps = 1e-8;
        ++t;
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad.array().square().matrix();
        const double bias1 = 1.0 - std::pow(beta1, t);
        const double bias2 = 1.0 - std::pow(beta2, t);
        theta.array() -=
            lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + eps);
    }
};

// Backward GAE over the episode segment [start, end); `bootstrap` is the value
// estimate past the segment end (0 for terminal episodes).
void fill_gae(const std::vector<double>& rewards, const std::vector<double>& values,
              std::size_t start, std::size_t end, double bootstrap, double gamma,
              double lambda, std::vector<double>& advantages,
              std::vector<double>& returns) {
    double adv = 0.0;
    for (std::size_t t = end; t-- > start;) {
        const double next_v = (t + 1 < end) ? values[t + 1] : bootstrap;
        const double delta = rewards[t] + gamma * next_v - values[t];
        adv = delta + gamma * lambda * adv;
        advantages[t] = adv;
        returns[t] = adv + values[t];
    }
}

}  // namespace

TrainResult train(const Curriculum& curriculum, const TrainConfig& config,
                  std::uint64_t seed, const EvalSet& eval_set, const EnvConfig& env) {
    config.validate();
    if (curriculum.max_epoch != config.total_epochs) {
        throw std::invalid_argument(
            "train: curriculum max_epoch must equal config.total_epochs");
    }

    TrainResult result;
    result.policy = init_policy(config.hidden, derive_seed(seed, "policy-init"),
                                config.init_log_std);
    Eigen::VectorXd theta = result.policy.flatten();
    AdamState adam(theta.size());

    TrainingCurve& curve = result.curve;
    curve.train_rewards.reserve(static_cast<std::size_t>(config.total_epochs));
    curve.psi_schedule.reserve(static_cast<std::size_t>(config.total_epochs));

    const auto batch_n = static_cast<std::size_t>(config.batch_size);
    std::vector<double> rewards(batch_n), values(batch_n), adv(batch_n), rets(batch_n);

    for (int epoch = 0; epoch < config.total_epochs; ++epoch) {
        const EnvParams psi = param_at(curriculum, epoch);
        curve.psi_schedule.push_back(psi);

        Batch batch;
        batch.obs.resize(config.batch_size, kObservationDim);
        batch.actions.resize(config.batch_size, kActionDim);
        batch.old_logp.resize(config.batch_size);

        std::size_t collected = 0;
        int episode = 0;
        std::vector<double> completed_returns;
        double partial_return = 0.0;
        while (collected < batch_n) {
            const Track track = generate_track(
                psi,
                derive_seed(seed, "train-track", static_cast<std::uint64_t>(epoch),
                            static_cast<std::uint64_t>(episode)),
                env);
            EpisodeState state = make_episode(track);
            state.max_steps = config.max_episode_steps;
            auto rng = make_rng(seed, "train-act", static_cast<std::uint64_t>(epoch),
                                static_cast<std::uint64_t>(episode));

            const std::size_t seg_start = collected;
            double ep_return = 0.0;
            while (!state.terminated && collected < batch_n) {
                const Observation obs = observe(track, state);
                const ForwardResult fw = forward(result.policy, obs);
                const Eigen::VectorXd u =
                    sample_raw_action(result.policy, fw.action_mean, rng);
                const StepOutcome out = step(track, state, to_env_action(u));

                batch.obs.row(collected) = obs.transpose();
                batch.actions.row(collected) = u.transpose();
                batch.old_logp(collected) =
                    gaussian_log_prob(result.policy, fw.action_mean, u);
                rewards[collected] = out.reward;
                values[collected] = fw.value;
                ep_return += out.reward;
                ++collected;
            }

            double bootstrap = 0.0;
            if (!state.terminated) {
                bootstrap = forward(result.policy, observe(track, state)).value;
                partial_return = ep_return;
            } else {
                completed_returns.push_back(ep_return);
            }
            fill_gae(rewards, values, seg_start, collected, bootstrap, config.gamma,
                     config.gae_lambda, adv, rets);
            ++episode;
        }

        if (completed_returns.empty()) {
            curve.train_rewards.push_back(partial_return);
        } else {
            double sum = 0.0;
            for (const double r : completed_returns) sum += r;
            curve.train_rewards.push_back(sum / completed_returns.size());
        }

        batch.advantages =
            Eigen::Map<const Eigen::VectorXd>(adv.data(), config.batch_size);
        batch.returns =
            Eigen::Map<const Eigen::VectorXd>(rets.data(), config.batch_size);
        normalize_advantages(batch.advantages);

        bool diverged = false;
        for (int pass = 0; pass < config.update_epochs; ++pass) {
            const Eigen::VectorXd theta_before = theta;
            try {
                const LossResult loss = clipped_surrogate_loss(
                    batch, result.policy, config.clip_epsilon, config.value_coeff,
                    config.entropy_coeff);
                adam.step(theta, loss.grad, config.learning_rate);
            } catch (const NumericalError&) {
                theta = theta_before;
                diverged = true;
                break;
            }
            PolicyParams updated = PolicyParams::unflatten(theta, config.hidden);
            if (!updated.all_finite()) {
                theta = theta_before;
                diverged = true;
                break;
            }
            updated.clamp_log_std();
            theta = updated.flatten();
            result.policy = std::move(updated);
        }
        if (diverged) {
            curve.diverged = true;
            curve.divergence_epoch = epoch;
            return result;
        }

        if (epoch % config.eval_every == 0) {
            const MetricsReport report = evaluate_policy(
                make_greedy_policy(result.policy), eval_set, config.eval_n,
                derive_seed(seed, "train-eval", static_cast<std::uint64_t>(epoch)), env);
            curve.evals.push_back({epoch, report.mean_reward, report.std_reward});
        }
    }
    return result;
}

double objective_from_training(const TrainingCurve& curve, const PolicyParams& policy,
                               const EvalSet& hard_set, int n_eval, std::uint64_t seed,
                               const EnvConfig& env, double floor) {
    if (curve.diverged) {
        return floor;
    }
    return evaluate_policy(make_greedy_policy(policy), hard_set, n_eval, seed, env)
        .mean_reward;
}

}  // namespace raceline
