// raceline: train and search racing curricula, evaluate policies.
//
// Examples:
//   raceline --mode train-default --profile desk --seed 0 --out runs/default
//   raceline --mode search-bo --profile desk --seed 0 --out runs/bo
//   raceline --mode evaluate --checkpoint runs/bo/best_policy.bin --set hard --n 500

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "raceline.h"

int main(int argc, char** argv) {
    CLI::App app{"raceline: curriculum search for robust racing policies"};

    std::string mode;
    std::string profile = "desk";
    std::uint64_t seed = 0;
    std::string out_dir = "runs/out";
    std::string config_path;
    std::string eval_set;
    int n = -1;
    std::string checkpoint;
    std::string env_mode;

    app.add_option("--mode", mode,
                   "train-default | train-manual | search-bo | evaluate | sweep")
        ->required();
    app.add_option("--profile", profile, "desk | paper (default desk)");
    app.add_option("--seed", seed, "master random seed (default 0)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--config", config_path, "JSON config file with overrides");
    app.add_option("--set", eval_set, "evaluation set: easy | hard");
    app.add_option("--n", n, "episode count for evaluate/sweep");
    app.add_option("--checkpoint", checkpoint,
                   "policy checkpoint (evaluate/sweep) or search checkpoint (search-bo resume)");
    app.add_option("--env-mode", env_mode, "environment parameterization: kp | kappa | p");

    CLI11_PARSE(app, argc, argv);

    nlohmann::json overrides = nlohmann::json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file " << config_path << "\n";
            return 1;
        }
        try {
            overrides = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "error: bad config file " << config_path << ": " << e.what()
                      << "\n";
            return 1;
        }
    }
    overrides["seed"] = seed;
    overrides["out"] = out_dir;
    if (!eval_set.empty()) overrides["eval_set"] = eval_set;
    if (n >= 0) {
        overrides["eval_n"] = n;
        overrides["sweep_n"] = n;
    }
    if (!checkpoint.empty()) overrides["checkpoint"] = checkpoint;
    if (!env_mode.empty()) overrides["env_mode"] = env_mode;

    rl_session* session = nullptr;
    rl_status status =
        rl_session_create(profile.c_str(), overrides.dump().c_str(), &session);
    if (status != RL_OK) {
        std::cerr << "error: " << rl_last_error_message() << "\n";
        return 1;
    }
    status = rl_session_run(session, mode.c_str());
    if (status != RL_OK) {
        std::cerr << "error: " << rl_last_error_message() << "\n";
        rl_session_destroy(session);
        return 1;
    }
    rl_session_destroy(session);
    return 0;
}
