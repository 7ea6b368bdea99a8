#include "raceline.h"

#include <cstring>
#include <exception>
#include <stdexcept>
#include <string>

#include "raceline/errors.hpp"
#include "raceline/io.hpp"
#include "raceline/run.hpp"

namespace {

thread_local std::string g_last_error;

rl_status capture(rl_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
rl_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return capture(RL_INVALID_ARGUMENT, e.what());
    } catch (const raceline::CurriculumError& e) {
        return capture(RL_INVALID_CURRICULUM, e.what());
    } catch (const raceline::NumericalError& e) {
        return capture(RL_NUMERICAL_FAILURE, e.what());
    } catch (const raceline::StateError& e) {
        return capture(RL_INVALID_STATE, e.what());
    } catch (const nlohmann::json::exception& e) {
        return capture(RL_INVALID_ARGUMENT, e.what());
    } catch (const std::ios_base::failure& e) {
        return capture(RL_IO_ERROR, e.what());
    } catch (const std::runtime_error& e) {
        // Engine I/O failures surface as runtime_error with a path in the text.
        return capture(RL_IO_ERROR, e.what());
    } catch (const std::exception& e) {
        return capture(RL_UNKNOWN_ERROR, e.what());
    } catch (...) {
        return capture(RL_UNKNOWN_ERROR, "unknown error");
    }
}

}  // namespace

struct rl_session {
    raceline::RunConfig config;
    std::string config_cache;
};

struct rl_curriculum {
    raceline::Curriculum curriculum;
};

extern "C" {

const char* rl_version(void) { return "0.1.0"; }

const char* rl_last_error_message(void) { return g_last_error.c_str(); }

rl_status rl_session_create(const char* profile, const char* config_json,
                            rl_session** out_session) {
    return guarded([&]() -> rl_status {
        if (out_session == nullptr) {
            return capture(RL_INVALID_ARGUMENT, "out_session is NULL");
        }
        *out_session = nullptr;
        const std::string profile_name = profile ? profile : "desk";
        raceline::RunConfig config = raceline::default_config(profile_name);
        if (config_json != nullptr && config_json[0] != '\0') {
            raceline::apply_json(config, nlohmann::json::parse(config_json));
        }
        *out_session = new rl_session{std::move(config), {}};
        return RL_OK;
    });
}

void rl_session_destroy(rl_session* session) { delete session; }

const char* rl_session_config_json(rl_session* session) {
    if (session == nullptr) return "";
    session->config_cache = raceline::to_json(session->config).dump();
    return session->config_cache.c_str();
}

rl_status rl_session_run(rl_session* session, const char* mode) {
    return guarded([&]() -> rl_status {
        if (session == nullptr) {
            return capture(RL_INVALID_ARGUMENT, "session is NULL");
        }
        if (mode == nullptr || mode[0] == '\0') {
            return capture(RL_INVALID_ARGUMENT, "mode is NULL or empty");
        }
        raceline::RunConfig config = session->config;
        config.mode = mode;
        raceline::run(config);
        return RL_OK;
    });
}

rl_status rl_curriculum_parse(const char* json_text, rl_curriculum** out_curriculum) {
    return guarded([&]() -> rl_status {
        if (json_text == nullptr || out_curriculum == nullptr) {
            return capture(RL_INVALID_ARGUMENT, "json_text and out_curriculum are required");
        }
        *out_curriculum = new rl_curriculum{
            raceline::curriculum_from_json(nlohmann::json::parse(json_text))};
        return RL_OK;
    });
}

rl_status rl_curriculum_create(const double* ends, size_t n_ends, const char* env_mode,
                               int max_epoch, rl_curriculum** out_curriculum) {
    return guarded([&]() -> rl_status {
        if (out_curriculum == nullptr || (ends == nullptr && n_ends > 0)) {
            return capture(RL_INVALID_ARGUMENT, "ends and out_curriculum are required");
        }
        *out_curriculum = nullptr;
        raceline::EnvMode mode = raceline::EnvMode::kp;
        const std::string mode_name = env_mode ? env_mode : "kp";
        if (mode_name == "kp") {
            mode = raceline::EnvMode::kp;
        } else if (mode_name == "kappa") {
            mode = raceline::EnvMode::kappa_only;
        } else if (mode_name == "p") {
            mode = raceline::EnvMode::p_only;
        } else {
            return capture(RL_INVALID_ARGUMENT, "env_mode must be kp, kappa or p");
        }
        const raceline::PsiLadder ladder = raceline::default_ladder(mode);
        if (ladder.size() != n_ends + 1) {
            return capture(RL_INVALID_ARGUMENT,
                           "built-in ladders need exactly 3 segment ends");
        }
        Eigen::VectorXd v(static_cast<Eigen::Index>(n_ends));
        for (size_t i = 0; i < n_ends; ++i) v(static_cast<Eigen::Index>(i)) = ends[i];
        *out_curriculum =
            new rl_curriculum{raceline::make_curriculum(v, ladder, max_epoch)};
        return RL_OK;
    });
}

void rl_curriculum_destroy(rl_curriculum* curriculum) { delete curriculum; }

rl_status rl_curriculum_param_at(const rl_curriculum* curriculum, int epoch,
                                 double* out_kappa, double* out_p) {
    return guarded([&]() -> rl_status {
        if (curriculum == nullptr || out_kappa == nullptr || out_p == nullptr) {
            return capture(RL_INVALID_ARGUMENT, "curriculum and out pointers are required");
        }
        const raceline::EnvParams params = raceline::param_at(curriculum->curriculum, epoch);
        *out_kappa = params.kappa;
        *out_p = params.p;
        return RL_OK;
    });
}

rl_status rl_curriculum_to_json(const rl_curriculum* curriculum, char* buffer,
                                size_t buffer_size, size_t* out_required) {
    return guarded([&]() -> rl_status {
        if (curriculum == nullptr || out_required == nullptr) {
            return capture(RL_INVALID_ARGUMENT, "curriculum and out_required are required");
        }
        const std::string text = raceline::to_json(curriculum->curriculum).dump();
        *out_required = text.size() + 1;
        if (buffer == nullptr || buffer_size < text.size() + 1) {
            return capture(RL_INVALID_ARGUMENT, "buffer too small");
        }
        std::memcpy(buffer, text.c_str(), text.size() + 1);
        return RL_OK;
    });
}

}  // extern "C"
