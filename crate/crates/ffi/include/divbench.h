#ifndef DIVBENCH_H
#define DIVBENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DbStatus {
  DB_STATUS_OK = 0,
  DB_STATUS_NULL_POINTER = 1,
  DB_STATUS_INVALID_ARGUMENT = 2,
  DB_STATUS_FORMAT = 3,
  DB_STATUS_IO = 4,
  DB_STATUS_OUT_OF_RANGE = 5,
  DB_STATUS_INTERNAL = 6,
} DbStatus;

/**
 * Opaque Ising problem.
 */
typedef struct DbProblem DbProblem;

/**
 * Opaque sample set.
 */
typedef struct DbSampleSet DbSampleSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *db_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void db_string_free(char *s);

/**
 * Parses a problem from its JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum DbStatus db_problem_from_json(const char *json, struct DbProblem **out);

/**
 * Generates an instance of class `"ran1"`, `"ac3"` or `"dcl"` on the
 * Chimera graph of side `size` (DCL uses default parameters).
 *
 * # Safety
 * `class_name` must be a NUL-terminated string and `out` writable.
 */
enum DbStatus db_problem_generate(const char *class_name,
                                  size_t size,
                                  uint64_t seed,
                                  struct DbProblem **out);

/**
 * # Safety
 * `problem` must be a live handle or null.
 */
void db_problem_free(struct DbProblem *problem);

/**
 * Number of spins, or 0 for a null handle.
 *
 * # Safety
 * `problem` must be a live handle or null.
 */
size_t db_problem_num_spins(const struct DbProblem *problem);

/**
 * Energy of `len` spins given as ±1 values.
 *
 * # Safety
 * `spins` must point to `len` readable bytes and `out` be writable.
 */
enum DbStatus db_problem_energy(const struct DbProblem *problem,
                                const int8_t *spins,
                                size_t len,
                                double *out);

/**
 * Serializes the problem as JSON into a new string.
 *
 * # Safety
 * `problem` must be a live handle and `out` writable.
 */
enum DbStatus db_problem_to_json(const struct DbProblem *problem, char **out);

/**
 * Runs the solver described by `spec_json` (for example
 * `{"solver": "sa", "schedule": [0.1, 1.0, 3.0], "num_reads": 10}`). A
 * `budget_ns` of 0 means no limit.
 *
 * # Safety
 * `problem` must be a live handle, `spec_json` NUL-terminated, `out` writable.
 */
enum DbStatus db_solve(const struct DbProblem *problem,
                       const char *spec_json,
                       uint64_t seed,
                       uint64_t budget_ns,
                       struct DbSampleSet **out);

/**
 * Parses a JSON-lines sample file. `expected_spins` of 0 accepts any size.
 *
 * # Safety
 * `text` must be NUL-terminated and `out` writable.
 */
enum DbStatus db_samples_from_jsonl(const char *text,
                                    size_t expected_spins,
                                    struct DbSampleSet **out);

/**
 * # Safety
 * `samples` must be a live handle and `out` writable.
 */
enum DbStatus db_samples_to_jsonl(const struct DbSampleSet *samples, char **out);

/**
 * # Safety
 * `samples` must be a live handle or null.
 */
void db_samples_free(struct DbSampleSet *samples);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `samples` must be a live handle or null.
 */
size_t db_samples_len(const struct DbSampleSet *samples);

/**
 * # Safety
 * `samples` must be a live handle or null.
 */
size_t db_samples_num_spins(const struct DbSampleSet *samples);

/**
 * Energy and emission time of sample `index`. Either output may be null.
 *
 * # Safety
 * `samples` must be a live handle; non-null outputs must be writable.
 */
enum DbStatus db_sample_info(const struct DbSampleSet *samples,
                             size_t index,
                             double *energy,
                             uint64_t *time_ns);

/**
 * Copies the ±1 spins of sample `index` into `buf`, which must hold
 * exactly the number of spins.
 *
 * # Safety
 * `samples` must be a live handle and `buf` point to `len` writable bytes.
 */
enum DbStatus db_sample_spins(const struct DbSampleSet *samples,
                              size_t index,
                              int8_t *buf,
                              size_t len);

/**
 * Lower bound on the diversity of all samples at radius `radius`
 * (fraction of the spin count), best of `shuffles` greedy scans.
 *
 * # Safety
 * `samples` must be a live handle and `out` writable.
 */
enum DbStatus db_diversity_lower_bound(const struct DbSampleSet *samples,
                                       double radius,
                                       size_t shuffles,
                                       uint64_t seed,
                                       size_t *out);

/**
 * Time to diversity for success probability `p` over blocks of `n_runs`
 * runs of length `t_a_ns`. Writes infinity when `p` is 0.
 *
 * # Safety
 * `out` must be writable.
 */
enum DbStatus db_ttd(double p, uint64_t n_runs, double t_a_ns, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIVBENCH_H */
