#ifndef EAGLE_TUNE_H
#define EAGLE_TUNE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EtStatus {
  ET_STATUS_OK = 0,
  ET_STATUS_NULL_POINTER = 1,
  ET_STATUS_INVALID_ARGUMENT = 2,
  ET_STATUS_NOT_HURWITZ = 3,
  ET_STATUS_NUMERICAL = 4,
  ET_STATUS_CONFIG = 5,
  ET_STATUS_RUNTIME = 6,
  ET_STATUS_IO = 7,
  ET_STATUS_PANIC = 8,
} EtStatus;

typedef enum EtAlgorithm {
  ET_ALGORITHM_ES_PSO = 0,
  ET_ALGORITHM_ES_FFA = 1,
  ET_ALGORITHM_PSO = 2,
  ET_ALGORITHM_FFA = 3,
} EtAlgorithm;

/**
 * Opaque run configuration.
 */
typedef struct EtConfig EtConfig;

/**
 * Opaque objective function.
 */
typedef struct EtObjective EtObjective;

/**
 * Opaque optimizer result.
 */
typedef struct EtResult EtResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *et_last_error_message(void);

/**
 * Solves `AᵀP + PA = −Q` for a Hurwitz 2×2 `a` and symmetric `q`, both
 * row-major. Writes `(p11, p12, p22)` to `p_out`.
 *
 * # Safety
 * `a` and `q` must point to 4 readable doubles, `p_out` to 3 writable ones.
 */
enum EtStatus et_solve_lyapunov(const double *a, const double *q, double *p_out);

/**
 * Lévy flight density at `step > 0` for `1 < lambda < 2`.
 *
 * # Safety
 * `out` must point to a writable double.
 */
enum EtStatus et_levy_density(double step, double lambda, double *out);

/**
 * Creates a benchmark objective (`"sphere"`, `"rosenbrock"`, `"rastrigin"`)
 * on the box `[lower, upper]^dim`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum EtStatus et_objective_benchmark_new(const char *name,
                                         size_t dim,
                                         double lower,
                                         double upper,
                                         struct EtObjective **out);

/**
 * Creates the objective selected by a configuration (benchmark or BLDC
 * tracking).
 *
 * # Safety
 * `config` must come from [`et_config_parse`] or [`et_config_load`]; `out`
 * must be writable.
 */
enum EtStatus et_objective_from_config(const struct EtConfig *config, struct EtObjective **out);

/**
 * Dimension of the objective's search box.
 *
 * # Safety
 * `objective` must be a live handle or null (returns 0).
 */
size_t et_objective_dimension(const struct EtObjective *objective);

/**
 * Evaluates the objective at `x[0..len]`.
 *
 * # Safety
 * `objective` must be a live handle, `x` must point to `len` doubles, `out`
 * must be writable.
 */
enum EtStatus et_objective_evaluate(const struct EtObjective *objective,
                                    const double *x,
                                    size_t len,
                                    double *out);

/**
 * # Safety
 * `objective` must be null or a handle not yet freed.
 */
void et_objective_free(struct EtObjective *objective);

/**
 * Minimizes `objective` with default algorithm parameters (30 agents, 20
 * iterations). `eval_budget = 0` selects the default of 600 evaluations.
 *
 * # Safety
 * `objective` must be a live handle; `out` must be writable.
 */
enum EtStatus et_run(const struct EtObjective *objective,
                     enum EtAlgorithm algorithm,
                     uint64_t seed,
                     uint64_t eval_budget,
                     struct EtResult **out);

/**
 * Number of coordinates in the result's best position.
 *
 * # Safety
 * `result` must be a live handle or null (returns 0).
 */
size_t et_result_dimension(const struct EtResult *result);

/**
 * Copies the best position into `position[0..len]` and the best value,
 * evaluations used and whether the run stopped on the tolerance rule into
 * the remaining outputs. Any output pointer may be null to skip it.
 *
 * # Safety
 * `result` must be a live handle; non-null outputs must be writable, with
 * `position` holding `len` doubles.
 */
enum EtStatus et_result_best(const struct EtResult *result,
                             double *position,
                             size_t len,
                             double *value,
                             uint64_t *evaluations,
                             bool *stopped_on_tolerance);

/**
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void et_result_free(struct EtResult *result);

/**
 * Parses and validates TOML configuration text.
 *
 * # Safety
 * `toml_text` must be a NUL-terminated string; `out` must be writable.
 */
enum EtStatus et_config_parse(const char *toml_text, struct EtConfig **out);

/**
 * Reads and validates a TOML configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum EtStatus et_config_load(const char *path, struct EtConfig **out);

/**
 * Overrides the configured seed.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum EtStatus et_config_set_seed(struct EtConfig *config, uint64_t seed);

/**
 * Runs the configured experiment. With a non-null `out_dir` the CSV/JSON
 * outputs are written there; with null nothing touches the filesystem.
 *
 * # Safety
 * `config` must be a live handle, `out_dir` null or a NUL-terminated string,
 * `out` writable.
 */
enum EtStatus et_config_run(const struct EtConfig *config,
                            const char *out_dir,
                            struct EtResult **out);

/**
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void et_config_free(struct EtConfig *config);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EAGLE_TUNE_H */
