/* C interface to the trustpcl library.
 *
 * Every function returns a tpcl_status. On failure the message of the most
 * recent error on the calling thread is available from tpcl_last_error().
 * Handles are opaque and owned by the caller; release them with the matching
 * destroy function. Strings returned through char** are released with
 * tpcl_string_free(). Distinct handles may be used from distinct threads.
 */
#ifndef TRUSTPCL_TRUSTPCL_H
#define TRUSTPCL_TRUSTPCL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TRUSTPCL_BUILDING)
#define TPCL_API __declspec(dllexport)
#else
#define TPCL_API __declspec(dllimport)
#endif
#else
#define TPCL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tpcl_status {
  TPCL_OK = 0,
  TPCL_ERR_CONFIG = 1,
  TPCL_ERR_NUMERIC = 2,
  TPCL_ERR_SHAPE = 3,
  TPCL_ERR_USAGE = 4,
  TPCL_ERR_DOMAIN = 5,
  TPCL_ERR_INFEASIBLE = 6,
  TPCL_ERR_INSUFFICIENT_DATA = 7,
  TPCL_ERR_IO = 8,
  TPCL_ERR_INVALID_ARGUMENT = 9, /* null handle or pointer */
  TPCL_ERR_INTERNAL = 10
} tpcl_status;

TPCL_API const char* tpcl_last_error(void);
TPCL_API const char* tpcl_status_name(tpcl_status status);
TPCL_API const char* tpcl_version(void);
TPCL_API void tpcl_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

typedef struct tpcl_config tpcl_config;

/* preset: "off_policy" (alias "default"), "on_policy" or "chain_tabular". */
TPCL_API tpcl_status tpcl_config_create(const char* preset, tpcl_config** out);
TPCL_API tpcl_status tpcl_config_load(const char* path, tpcl_config** out);
TPCL_API tpcl_status tpcl_config_parse(const char* text, tpcl_config** out);
TPCL_API tpcl_status tpcl_config_clone(const tpcl_config* config, tpcl_config** out);
TPCL_API void tpcl_config_destroy(tpcl_config* config);

TPCL_API tpcl_status tpcl_config_set(tpcl_config* config, const char* key, const char* value);
TPCL_API tpcl_status tpcl_config_get(const tpcl_config* config, const char* key, char** out);
TPCL_API tpcl_status tpcl_config_validate(const tpcl_config* config);
/* Flat "key = value" text with every default materialized. */
TPCL_API tpcl_status tpcl_config_serialize(const tpcl_config* config, char** out);
/* git-style blob SHA-1 of the serialized config, 40 hex digits. */
TPCL_API tpcl_status tpcl_config_hash(const tpcl_config* config, char** out);

/* ---- run manifests ---------------------------------------------------- */

TPCL_API tpcl_status tpcl_manifest_write(const tpcl_config* config, const uint64_t* seeds, size_t num_seeds,
                                         const char* path);
/* Loads a manifest. Writes at most `capacity` seeds and the total count. */
TPCL_API tpcl_status tpcl_manifest_load(const char* path, tpcl_config** config, uint64_t* seeds, size_t capacity,
                                        size_t* num_seeds);
/* File names of the per-seed artifacts, relative to the output directory. */
TPCL_API tpcl_status tpcl_run_file_names(uint64_t seed, char** metrics_csv, char** checkpoint);

/* ---- training --------------------------------------------------------- */

typedef struct tpcl_metrics_row {
  int64_t iteration;
  int64_t env_steps;
  double eval_return;
  double lambda;
  double kl_estimate;
  double kl_target;
  double loss;
  double tau;
  double seconds;
} tpcl_metrics_row;

typedef struct tpcl_trainer_state {
  int64_t iteration;
  int64_t env_steps;
  double lambda;
  double tau;
  double loss;
  int trained; /* 1 when the last iteration took a gradient step */
} tpcl_trainer_state;

typedef struct tpcl_trainer tpcl_trainer;

TPCL_API tpcl_status tpcl_trainer_create(const tpcl_config* config, uint64_t seed, tpcl_trainer** out);
TPCL_API void tpcl_trainer_destroy(tpcl_trainer* trainer);
/* One collect / train / update iteration, without evaluation. */
TPCL_API tpcl_status tpcl_trainer_step(tpcl_trainer* trainer);
/* Remaining iterations with periodic evaluation. */
TPCL_API tpcl_status tpcl_trainer_run(tpcl_trainer* trainer);
TPCL_API tpcl_status tpcl_trainer_state_get(const tpcl_trainer* trainer, tpcl_trainer_state* out);
TPCL_API tpcl_status tpcl_trainer_evaluate(const tpcl_trainer* trainer, int episodes, double* mean_return);
TPCL_API tpcl_status tpcl_trainer_metrics_count(const tpcl_trainer* trainer, size_t* count);
TPCL_API tpcl_status tpcl_trainer_metrics_row(const tpcl_trainer* trainer, size_t index, tpcl_metrics_row* out);
TPCL_API tpcl_status tpcl_trainer_write_metrics(const tpcl_trainer* trainer, const char* path);
TPCL_API tpcl_status tpcl_trainer_save_checkpoint(const tpcl_trainer* trainer, const char* path);

/* CSV header and row text in the fixed metrics column order. */
TPCL_API const char* tpcl_metrics_header(void);
TPCL_API tpcl_status tpcl_metrics_format(const tpcl_metrics_row* row, char** out);

/* Mean greedy return of a saved checkpoint on environment `env`. */
TPCL_API tpcl_status tpcl_evaluate_checkpoint(const char* checkpoint_path, const char* env, int episodes,
                                              uint64_t seed, double* mean_return);

/* ---- verification ----------------------------------------------------- */

typedef struct tpcl_oracle_row {
  uint64_t seed;
  int num_states;
  int num_actions;
  double max_residual;
  double max_violation;
  int converged;
} tpcl_oracle_row;

typedef void (*tpcl_oracle_row_fn)(const tpcl_oracle_row* row, void* user);

/* The committed corpus of random tabular MDP seeds. */
TPCL_API tpcl_status tpcl_oracle_corpus_seeds(const uint64_t** seeds, size_t* count);
/* Solves each MDP and checks the consistency identity for d = 1..d_max.
 * `passed` is 1 iff every violation is at most 1e-8 and every solve reached a
 * residual of at most 1e-10. corrupt_first perturbs the first solution. */
TPCL_API tpcl_status tpcl_oracle_check(const uint64_t* seeds, size_t count, int d_max, int corrupt_first,
                                       tpcl_oracle_row_fn on_row, void* user, double* overall_max_violation,
                                       int* passed);

typedef struct tpcl_grad_entry {
  const char* name;
  double max_relative_error;
  int num_params;
} tpcl_grad_entry;

typedef void (*tpcl_grad_entry_fn)(const tpcl_grad_entry* entry, void* user);

/* Finite-difference gradient checks (h = 1e-5). `passed` is 1 iff every
 * relative error is below 1e-4. break_gradient perturbs every analytic
 * gradient. */
TPCL_API tpcl_status tpcl_grad_check(int break_gradient, tpcl_grad_entry_fn on_entry, void* user, double* worst,
                                     int* passed);

/* ---- trust region ----------------------------------------------------- */

TPCL_API tpcl_status tpcl_estimate_kl(const double* returns, size_t count, double lambda, double* kl);

typedef enum tpcl_lambda_status {
  TPCL_LAMBDA_SOLVED = 0,
  TPCL_LAMBDA_AT_LOWER_BOUND = 1,
  TPCL_LAMBDA_AT_UPPER_BOUND = 2,
  TPCL_LAMBDA_INSUFFICIENT_DATA = 3
} tpcl_lambda_status;

/* Solves KL(lambda) = epsilon * mean_length inside [lambda_min, lambda_max]. */
TPCL_API tpcl_status tpcl_solve_lambda(const double* returns, size_t count, double mean_length, double epsilon,
                                       double lambda_min, double lambda_max, double* lambda, double* kl,
                                       tpcl_lambda_status* status);

#ifdef __cplusplus
}
#endif

#endif /* TRUSTPCL_TRUSTPCL_H */
