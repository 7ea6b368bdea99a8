/* raceline C API: curriculum search engine for robust racing policies.
 *
 * All entry points return rl_status; RL_OK means success. On failure,
 * rl_last_error_message() returns a thread-local description of the most
 * recent error. Handles are opaque and must be released with the matching
 * _destroy function.
 */
#ifndef RACELINE_H
#define RACELINE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
    RL_OK = 0,
    RL_INVALID_ARGUMENT = 1,
    RL_INVALID_CURRICULUM = 2,
    RL_NUMERICAL_FAILURE = 3,
    RL_INVALID_STATE = 4,
    RL_IO_ERROR = 5,
    RL_UNKNOWN_ERROR = 6
} rl_status;

typedef struct rl_session rl_session;
typedef struct rl_curriculum rl_curriculum;

const char* rl_version(void);

/* Thread-local message for the last failing call on this thread; never NULL. */
const char* rl_last_error_message(void);

/* Creates a session from a profile name ("desk" or "paper") plus a JSON
 * document of overrides (may be NULL or empty for pure defaults). The JSON
 * accepts the same keys as the CLI config file. */
rl_status rl_session_create(const char* profile, const char* config_json,
                            rl_session** out_session);
void rl_session_destroy(rl_session* session);

/* Resolved session configuration as a JSON string owned by the session;
 * valid until the next rl_session_* call. */
const char* rl_session_config_json(rl_session* session);

/* Runs one mode (train-default | train-manual | search-bo | evaluate | sweep)
 * and writes all artifacts under the configured output directory. */
rl_status rl_session_run(rl_session* session, const char* mode);

/* Curriculum helpers ------------------------------------------------------ */

/* Parses the JSON schedule document written by the engine
 * ({"max_epoch": ..., "segments": [{"start_epoch", "kappa", "p"}, ...]}). */
rl_status rl_curriculum_parse(const char* json_text, rl_curriculum** out_curriculum);

/* Builds a schedule from real-valued segment ends over a built-in ladder.
 * env_mode is one of "kp", "kappa", "p". */
rl_status rl_curriculum_create(const double* ends, size_t n_ends, const char* env_mode,
                               int max_epoch, rl_curriculum** out_curriculum);
void rl_curriculum_destroy(rl_curriculum* curriculum);

rl_status rl_curriculum_param_at(const rl_curriculum* curriculum, int epoch,
                                 double* out_kappa, double* out_p);
rl_status rl_curriculum_to_json(const rl_curriculum* curriculum, char* buffer,
                                size_t buffer_size, size_t* out_required);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RACELINE_H */
