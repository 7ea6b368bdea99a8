#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "raceline/bo_search.hpp"
#include "raceline/curriculum.hpp"
#include "raceline/ppo.hpp"
#include "raceline/race_env.hpp"

namespace raceline {

// Fully resolved configuration of one tool invocation. Profiles provide the
// defaults; a config file and CLI flags override individual fields.
struct RunConfig {
    std::string mode;            // train-default | train-manual | search-bo | evaluate | sweep
    std::string profile = "desk";
    std::uint64_t seed = 0;
    std::string out_dir = "runs/out";
    EnvMode env_mode = EnvMode::kp;

    EnvConfig env;
    TrainConfig train;
    double learning_rate_default = 0.0005;  // train-default runs; curriculum runs use train.learning_rate
    SearchConfig search;
    std::vector<double> manual_ends;  // built-in manual curriculum (segment ends)

    std::string checkpoint;      // policy checkpoint (evaluate/sweep) or search checkpoint (search-bo resume)
    std::string eval_set = "hard";
    int eval_n = 500;
    int sweep_n = 100;
    int final_eval_n = 100;      // hard-set evaluation appended after training runs
};

// Profile defaults: "desk" is a reduced configuration that finishes a full
// search in minutes; "paper" is the full-scale setup.
RunConfig default_config(const std::string& profile);

// Applies overrides from a JSON document (only keys that are present).
void apply_json(RunConfig& config, const nlohmann::json& overrides);

nlohmann::json to_json(const RunConfig& config);

// Digest over the resolved configuration, excluding the output directory.
std::uint64_t config_digest(const RunConfig& config);

// Executes one mode, writes all artifacts under config.out_dir. Returns 0 on
// success. Throws on configuration or I/O errors.
int run(const RunConfig& config);

}  // namespace raceline
