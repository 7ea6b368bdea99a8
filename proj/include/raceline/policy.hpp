#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <random>

#include "raceline/race_env.hpp"

namespace raceline {

// Two-layer tanh perceptrons: an actor trunk feeding the action-mean head
// plus a state-independent log-std, and an independent critic trunk feeding
// the value head. Keeping the trunks separate stops the value regression from
// dragging the action distribution around through shared weights.
struct PolicyParams {
    Eigen::MatrixXd w1_actor;   // hidden x kObservationDim
    Eigen::VectorXd b1_actor;   // hidden
    Eigen::MatrixXd w_act;      // kActionDim x hidden
    Eigen::VectorXd b_act;      // kActionDim
    Eigen::MatrixXd w1_critic;  // hidden x kObservationDim
    Eigen::VectorXd b1_critic;  // hidden
    Eigen::RowVectorXd w_val;   // 1 x hidden
    double b_val = 0.0;
    Eigen::VectorXd log_std;    // kActionDim, clamped to [-5, 2]

    int hidden() const { return static_cast<int>(b1_actor.size()); }
    int n_params() const;
    Eigen::VectorXd flatten() const;
    static PolicyParams unflatten(const Eigen::VectorXd& theta, int hidden);
    bool all_finite() const;
    void clamp_log_std();
};

// Xavier-style trunk, small-gain actor head.
PolicyParams init_policy(int hidden, std::uint64_t seed, double init_log_std = -0.5);

struct ForwardResult {
    Eigen::VectorXd hidden_actor;   // tanh activations of the actor trunk
    Eigen::VectorXd hidden_critic;  // tanh activations of the critic trunk
    Eigen::VectorXd action_mean;    // kActionDim
    double value = 0.0;
};

ForwardResult forward(const PolicyParams& params, const Observation& obs);

// Diagonal-Gaussian log density of raw action u given the head mean.
double gaussian_log_prob(const PolicyParams& params, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& u);

// Raw actions are unbounded; they are clamped into the action box on use.
Action to_env_action(const Eigen::VectorXd& u);

Eigen::VectorXd sample_raw_action(const PolicyParams& params, const Eigen::VectorXd& mean,
                                  std::mt19937_64& rng);

// Deterministic mean-action policy for evaluation.
Policy make_greedy_policy(PolicyParams params);

// Versioned binary checkpoint with an embedded config digest.
void save_policy(const std::filesystem::path& path, const PolicyParams& params,
                 std::uint64_t config_digest);

struct PolicyCheckpoint {
    PolicyParams params;
    std::uint64_t config_digest = 0;
};

PolicyCheckpoint load_policy(const std::filesystem::path& path);

}  // namespace raceline
