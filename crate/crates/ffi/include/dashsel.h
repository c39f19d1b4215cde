#ifndef DASHSEL_H
#define DASHSEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DashBaseline {
  DashBaseline_Greedy = 0,
  DashBaseline_GreedyParallel = 1,
  DashBaseline_TopK = 2,
  DashBaseline_Random = 3,
} DashBaseline;

typedef enum DashObjective {
  DashObjective_Reg = 0,
  DashObjective_R2 = 1,
  DashObjective_Class = 2,
  DashObjective_Aopt = 3,
} DashObjective;

/**
 * Result code of every fallible call.
 */
typedef enum DashStatus {
  DashStatus_Ok = 0,
  DashStatus_NullPointer = 1,
  DashStatus_InvalidArgument = 2,
  DashStatus_DataError = 3,
  DashStatus_SizeError = 4,
  DashStatus_NumericError = 5,
  DashStatus_DomainError = 6,
  DashStatus_IoError = 7,
  DashStatus_Panic = 8,
} DashStatus;

typedef struct DashDataset DashDataset;

typedef struct DashOracle DashOracle;

typedef struct DashSelection DashSelection;

/**
 * Selector parameters. `alpha <= 0` and `opt < 0` select the guess grids;
 * `filter_cap = 0` selects the default cap.
 */
typedef struct DashParams {
  size_t k;
  size_t r;
  double epsilon;
  double alpha;
  double opt;
  size_t samples;
  size_t filter_cap;
  uint64_t seed;
} DashParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *dash_last_error(void);

/**
 * Builds a dataset from a row-major `d × n` feature array and an optional
 * length-`d` response (null for all zeros).
 *
 * # Safety
 * `features` must point to `d * n` doubles, `response` to `d` doubles or be
 * null, and `out` must be writable.
 */
enum DashStatus dash_dataset_new(const double *features,
                                 const double *response,
                                 size_t d,
                                 size_t n,
                                 struct DashDataset **out);

/**
 * Loads a dataset from CSV files; `response_path` may be null.
 *
 * # Safety
 * Paths must be NUL-terminated strings and `out` writable.
 */
enum DashStatus dash_dataset_load_csv(const char *features_path,
                                      const char *response_path,
                                      struct DashDataset **out);

/**
 * Number of observations, or 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live dataset handle.
 */
size_t dash_dataset_rows(const struct DashDataset *ds);

/**
 * Number of features, or 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live dataset handle.
 */
size_t dash_dataset_cols(const struct DashDataset *ds);

/**
 * # Safety
 * `ds` must be null or a handle not yet freed.
 */
void dash_dataset_free(struct DashDataset *ds);

/**
 * Builds an objective oracle over a dataset. `beta` and `sigma` are used by
 * the A-optimality objective only. The dataset may be freed afterwards.
 *
 * # Safety
 * `ds` must be a live dataset handle and `out` writable.
 */
enum DashStatus dash_oracle_new(const struct DashDataset *ds,
                                enum DashObjective objective,
                                double beta,
                                double sigma,
                                size_t workers,
                                struct DashOracle **out);

/**
 * Evaluates the objective on the given indices (duplicates are merged).
 *
 * # Safety
 * `indices` must point to `len` values (or be null with `len = 0`) and
 * `value` must be writable.
 */
enum DashStatus dash_oracle_eval(const struct DashOracle *oracle,
                                 const size_t *indices,
                                 size_t len,
                                 double *value);

/**
 * # Safety
 * `oracle` must be null or a live oracle handle.
 */
size_t dash_oracle_ground_size(const struct DashOracle *oracle);

/**
 * Queries issued so far through this handle.
 *
 * # Safety
 * `oracle` must be null or a live oracle handle.
 */
uint64_t dash_oracle_queries(const struct DashOracle *oracle);

/**
 * # Safety
 * `oracle` must be null or a handle not yet freed.
 */
void dash_oracle_free(struct DashOracle *oracle);

/**
 * Defaults: `k = 10`, `r = 5`, `ε = 0.1`, guess grids on, 5 samples.
 */
struct DashParams dash_params_default(void);

/**
 * Runs the adaptive-sampling selector.
 *
 * # Safety
 * `oracle` must be a live oracle handle, `params` readable and `out` writable.
 */
enum DashStatus dash_run(const struct DashOracle *oracle,
                         const struct DashParams *params,
                         struct DashSelection **out);

/**
 * Runs a baseline selector. `seed` is used by `Random`, `workers` by `GreedyParallel`.
 *
 * # Safety
 * `oracle` must be a live oracle handle and `out` writable.
 */
enum DashStatus dash_run_baseline(const struct DashOracle *oracle,
                                  enum DashBaseline baseline,
                                  size_t k,
                                  uint64_t seed,
                                  size_t workers,
                                  struct DashSelection **out);

/**
 * # Safety
 * `sel` must be null or a live selection handle.
 */
size_t dash_selection_len(const struct DashSelection *sel);

/**
 * Copies up to `cap` selected indices (ascending) into `buf`; returns the count copied.
 *
 * # Safety
 * `sel` must be null or a live selection handle; `buf` must hold `cap` values.
 */
size_t dash_selection_indices(const struct DashSelection *sel, size_t *buf, size_t cap);

/**
 * Objective value of the selection (NaN for a null handle).
 *
 * # Safety
 * `sel` must be null or a live selection handle.
 */
double dash_selection_value(const struct DashSelection *sel);

/**
 * # Safety
 * `sel` must be null or a live selection handle.
 */
uint64_t dash_selection_rounds(const struct DashSelection *sel);

/**
 * # Safety
 * `sel` must be null or a live selection handle.
 */
uint64_t dash_selection_queries(const struct DashSelection *sel);

/**
 * The full result, trace included, as a JSON string to release with
 * [`dash_string_free`]. Null on failure.
 *
 * # Safety
 * `sel` must be null or a live selection handle.
 */
char *dash_selection_to_json(const struct DashSelection *sel);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void dash_string_free(char *s);

/**
 * # Safety
 * `sel` must be null or a handle not yet freed.
 */
void dash_selection_free(struct DashSelection *sel);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DASHSEL_H */
