/* C interface to the arcenv engine.
 *
 * Objects are opaque handles created by arcenv_*_create / arcenv_make* and
 * released with the matching *_free function. Every fallible call returns an
 * arcenv_status; on failure arcenv_last_error() describes the problem for the
 * calling thread. Strings returned through char** out-parameters are owned by
 * the caller and released with arcenv_free_string.
 */
#ifndef ARCENV_H
#define ARCENV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ARCENV_API __declspec(dllexport)
#else
#define ARCENV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum arcenv_status {
  ARCENV_OK = 0,
  ARCENV_E_INVALID_ARGUMENT = 1,
  ARCENV_E_DIMENSION_OUT_OF_RANGE = 2,
  ARCENV_E_VALUE_OUT_OF_RANGE = 3,
  ARCENV_E_INVALID_OP = 4,
  ARCENV_E_MALFORMED_JSON = 5,
  ARCENV_E_MISSING_KEYS = 6,
  ARCENV_E_RAGGED_MATRIX = 7,
  ARCENV_E_TOO_MANY_PAIRS = 8,
  ARCENV_E_MISSING_DIRECTORY = 9,
  ARCENV_E_UNRESOLVED_SUBSET_ID = 10,
  ARCENV_E_EMPTY_BUFFER = 11,
  ARCENV_E_UNKNOWN_IDENTIFIER = 12,
  ARCENV_E_INVALID_CONFIG = 13,
  ARCENV_E_UNKNOWN_PARSER = 14,
  ARCENV_E_UNRESOLVABLE_CHANNEL = 15,
  ARCENV_E_SHAPE_MISMATCH = 16,
  ARCENV_E_UNKNOWN_DATASET = 17,
  ARCENV_E_NETWORK = 18,
  ARCENV_E_DIGEST_MISMATCH = 19,
  ARCENV_E_IO = 20,
  ARCENV_E_NULL_HANDLE = 21,
  ARCENV_E_INTERNAL = 22
} arcenv_status;

typedef enum arcenv_step_kind { ARCENV_STEP_FIRST = 0, ARCENV_STEP_MID = 1, ARCENV_STEP_LAST = 2 } arcenv_step_kind;

typedef struct arcenv_env arcenv_env;
typedef struct arcenv_batch arcenv_batch;

/* ---- errors and strings ---- */

ARCENV_API const char* arcenv_status_name(arcenv_status status);
/* Message of the last failure on this thread; "" if none. */
ARCENV_API const char* arcenv_last_error(void);
ARCENV_API void arcenv_free_string(char* s);
ARCENV_API const char* arcenv_version(void);

/* ---- environments ---- */

/* identifier: <dataset>[-<task id>], dataset one of Mini, AGI1, AGI2.
 * data_root may be NULL ($ARCENV_DATA_ROOT, else "data"). */
ARCENV_API arcenv_status arcenv_make(const char* identifier, const char* data_root, int auto_download,
                                     arcenv_env** out);
/* Loads a YAML/JSON config file, then applies "dotted.key=value" overrides. */
ARCENV_API arcenv_status arcenv_make_from_config(const char* path, const char* const* overrides,
                                                 size_t n_overrides, arcenv_env** out);
/* Config given as text; relative paths resolve against base_dir (may be NULL). */
ARCENV_API arcenv_status arcenv_make_from_config_text(const char* text, const char* base_dir,
                                                      const char* const* overrides, size_t n_overrides,
                                                      arcenv_env** out);
ARCENV_API void arcenv_env_free(arcenv_env* env);

/* Effective configuration as YAML. */
ARCENV_API arcenv_status arcenv_env_config_yaml(const arcenv_env* env, char** out);

typedef struct arcenv_env_info {
  int num_tasks;
  int channels;
  int rows; /* observation plane height */
  int cols; /* observation plane width */
  int action_arity;
  int flattened;
  int auto_reset;
  int train_mode;
  int max_episode_steps;
  uint64_t seed; /* seed from the config */
} arcenv_env_info;

ARCENV_API arcenv_status arcenv_env_get_info(const arcenv_env* env, arcenv_env_info* out);
/* Writes min(capacity, arity) component sizes; *n_dims receives the arity. */
ARCENV_API arcenv_status arcenv_env_action_dims(const arcenv_env* env, int64_t* dims, size_t capacity,
                                                size_t* n_dims);

/* ---- batches ---- */

/* lanes >= 1; workers 0 picks the hardware concurrency. */
ARCENV_API arcenv_status arcenv_batch_create(const arcenv_env* env, size_t lanes, unsigned workers,
                                             arcenv_batch** out);
ARCENV_API void arcenv_batch_free(arcenv_batch* batch);

/* Lane i is reset from child i of the seed's root key. */
ARCENV_API arcenv_status arcenv_batch_reset(arcenv_batch* batch, uint64_t seed);
/* keys holds 2 * lanes words: (hi, lo) per lane. */
ARCENV_API arcenv_status arcenv_batch_reset_keys(arcenv_batch* batch, const uint64_t* keys, size_t n_words);
/* From a seed the same way a single environment is reset: key = from_seed(seed) for lane 0. */
ARCENV_API arcenv_status arcenv_batch_reset_single(arcenv_batch* batch, uint64_t seed);

/* actions: lanes * arity values in the agent-facing encoding. */
ARCENV_API arcenv_status arcenv_batch_step(arcenv_batch* batch, const int64_t* actions, size_t n_values);

/* Draws one random action per lane from each lane's own stream, advancing it
 * exactly as a random-policy rollout does. */
ARCENV_API arcenv_status arcenv_batch_sample_actions(arcenv_batch* batch, int64_t* actions, size_t n_values);

/* Views into the batch's current timestep. Valid until the next reset, step
 * or free on this batch. */
typedef struct arcenv_batch_view {
  size_t lanes;
  int channels;
  int rows;
  int cols;
  const uint8_t* observations; /* lanes x channels x rows x cols */
  const double* reward;
  const uint8_t* step_kind; /* arcenv_step_kind values */
  const double* discount;
  const double* similarity;
  const uint8_t* solved;
  const uint8_t* applied;
} arcenv_batch_view;

ARCENV_API arcenv_status arcenv_batch_view_get(const arcenv_batch* batch, arcenv_batch_view* out);

/* Lane state summary. */
typedef struct arcenv_lane_state {
  int task_index;
  int pair_index;
  int step_count;
  int terminated;
  int truncated;
  int working_height;
  int working_width;
  uint64_t rng_hi;
  uint64_t rng_lo;
} arcenv_lane_state;

ARCENV_API arcenv_status arcenv_batch_lane_state(const arcenv_batch* batch, size_t lane, arcenv_lane_state* out);

/* ---- rollouts, benchmarks, rendering, datasets ---- */

typedef struct arcenv_rollout_summary {
  int64_t total_steps;
  int64_t episodes;
  int64_t successes;
  double reward_sum;
} arcenv_rollout_summary;

/* Seeded random-policy rollout; *jsonl receives one record per lane per step. */
ARCENV_API arcenv_status arcenv_rollout_jsonl(const arcenv_env* env, size_t lanes, int steps, uint64_t seed,
                                              unsigned workers, char** jsonl, arcenv_rollout_summary* summary);

typedef struct arcenv_bench_options {
  const int64_t* batch_sizes; /* NULL: the environment config's sizes */
  size_t n_batch_sizes;
  int steps_per_env; /* <= 0: config value */
  int repeats;       /* <= 0: config value */
  int warmup_runs;   /* < 0: config value */
  uint64_t seed;
  unsigned workers;  /* 0: config value, else hardware concurrency */
  int json;          /* emit JSON instead of CSV */
} arcenv_bench_options;

ARCENV_API void arcenv_bench_options_init(arcenv_bench_options* options);
ARCENV_API arcenv_status arcenv_bench_run(const arcenv_env* env, const arcenv_bench_options* options, char** out);
/* Speedup table joining two CSV documents on batch size. */
ARCENV_API arcenv_status arcenv_bench_table(const char* ours_csv, const char* baseline_csv, char** out);

/* mode: "single" | "pair" | "complete_task"; backend: "svg" | "ansi" | "ascii".
 * pair selects the demo pair for single/pair modes. cell_px <= 0 uses the config. */
ARCENV_API arcenv_status arcenv_render_task(const arcenv_env* env, const char* task_id, const char* mode,
                                            const char* backend, int pair, int cell_px, char** out);
/* Same, for a task JSON file on disk; uses the default palette. */
ARCENV_API arcenv_status arcenv_render_task_file(const char* path, const char* mode, const char* backend, int pair,
                                                 int cell_px, char** out);
/* Replays a seeded random rollout and renders one lane's step (before/after). */
ARCENV_API arcenv_status arcenv_render_rollout_step(const arcenv_env* env, size_t lanes, uint64_t seed, size_t lane,
                                                    int step, const char* backend, int cell_px, char** out);

/* Parses every task file under a directory. *report lists one line per
 * failing file; n_tasks / n_errors receive the counts. */
ARCENV_API arcenv_status arcenv_validate_dir(const char* path, const char* parser, char** report, int* n_tasks,
                                             int* n_errors);

/* Downloads a named dataset into dest. table_path may be NULL (built-in table). */
ARCENV_API arcenv_status arcenv_fetch(const char* name, const char* dest, const char* table_path, int allow_unpinned,
                                      char** dataset_dir);

#ifdef __cplusplus
}
#endif

#endif /* ARCENV_H */
