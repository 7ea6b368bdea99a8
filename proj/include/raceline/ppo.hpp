#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "raceline/curriculum.hpp"
#include "raceline/eval.hpp"
#include "raceline/policy.hpp"

namespace raceline {

struct TrainConfig {
    double learning_rate = 0.0002;
    int update_epochs = 10;       // optimization passes over each collected batch
    int batch_size = 1000;        // transitions per epoch
    int total_epochs = 1000;
    double clip_epsilon = 0.2;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    int eval_every = 50;
    int eval_n = 10;
    int hidden = 32;
    double entropy_coeff = 0.01;
    double value_coeff = 0.5;
    int max_episode_steps = 2000;  // rollout episode cap during training
    double init_log_std = -0.5;    // initial exploration noise (log scale)
    double divergence_floor = -1000.0;

    void validate() const;
};

struct EvalPoint {
    int epoch = 0;
    double mean_reward = 0.0;
    double std_reward = 0.0;
};

struct TrainingCurve {
    std::vector<double> train_rewards;     // one entry per epoch
    std::vector<EvalPoint> evals;          // at epochs divisible by eval_every
    std::vector<EnvParams> psi_schedule;   // parameters used at each epoch
    bool diverged = false;
    int divergence_epoch = -1;
};

struct Batch {
    Eigen::MatrixXd obs;      // n x kObservationDim
    Eigen::MatrixXd actions;  // n x kActionDim, raw pre-clamp samples
    Eigen::VectorXd old_logp;
    Eigen::VectorXd advantages;
    Eigen::VectorXd returns;

    int size() const { return static_cast<int>(obs.rows()); }
};

struct LossResult {
    double loss = 0.0;
    Eigen::VectorXd grad;      // with respect to PolicyParams::flatten()
    double policy_term = 0.0;  // -mean(min(r A, clip(r) A))
    double value_term = 0.0;   // mean squared value error (before value_coeff)
    double entropy = 0.0;
};

// loss = policy_term + value_coeff * value_term - entropy_coeff * entropy.
// Throws NumericalError when the loss is non-finite.
LossResult clipped_surrogate_loss(const Batch& batch, const PolicyParams& params,
                                  double clip_epsilon, double value_coeff = 0.5,
                                  double entropy_coeff = 0.01);

// In-place standardization to zero mean / unit variance (eps-guarded).
void normalize_advantages(Eigen::VectorXd& advantages);

struct TrainResult {
    PolicyParams policy;
    TrainingCurve curve;
};

// Trains under the curriculum schedule: at epoch e the rollout environments
// are drawn with param_at(curriculum, e). Deterministic given seed. A run
// whose weights go non-finite stops early with curve.diverged set instead of
// throwing.
TrainResult train(const Curriculum& curriculum, const TrainConfig& config,
                  std::uint64_t seed, const EvalSet& eval_set, const EnvConfig& env);

// Mean episode reward of the final policy over n_eval environments from the
// hard set; diverged runs return the configured floor.
double objective_from_training(const TrainingCurve& curve, const PolicyParams& policy,
                               const EvalSet& hard_set, int n_eval, std::uint64_t seed,
                               const EnvConfig& env, double floor = -1000.0);

}  // namespace raceline
