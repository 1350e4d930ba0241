#ifndef BELIEFCAST_H
#define BELIEFCAST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

#define BC_OK 0

#define BC_ERR_NULL -1

#define BC_ERR_UTF8 -2

#define BC_ERR_PARSE -3

#define BC_ERR_VALIDATION -4

#define BC_ERR_SIMULATION -5

#define BC_ERR_UNKNOWN_TARGET -6

#define BC_ERR_IO -7

#define BC_ERR_PANIC -99

/**
 * A validated network.
 */
typedef struct BcNetwork BcNetwork;

/**
 * Results of one simulation.
 */
typedef struct BcRun BcRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bc_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into the library on the same thread.
 */
const char *bc_last_error(void);

/**
 * Parse and validate a network document.
 *
 * # Safety
 * `json` must be NULL or a NUL-terminated string; `out` must be NULL or writable.
 */
int32_t bc_network_from_json(const char *json, struct BcNetwork **out);

/**
 * Read, parse and validate a network document file.
 *
 * # Safety
 * As for [`bc_network_from_json`].
 */
int32_t bc_network_from_file(const char *path, struct BcNetwork **out);

/**
 * Release a network. NULL is ignored.
 *
 * # Safety
 * `net` must be NULL or a handle from this library not yet freed.
 */
void bc_network_free(struct BcNetwork *net);

/**
 * # Safety
 * `net` must be NULL or a live handle; `out` must be NULL or writable.
 */
int32_t bc_network_node_count(const struct BcNetwork *net, size_t *out);

/**
 * Apply an overlay document to `net`, producing a new network. `net` is unchanged.
 *
 * # Safety
 * `net` a live handle, `overlay_json` a NUL-terminated string, `out` writable.
 */
int32_t bc_network_apply_overlay(const struct BcNetwork *net,
                                 const char *overlay_json,
                                 struct BcNetwork **out);

/**
 * Canonical JSON of `net`. Free the string with [`bc_string_free`].
 *
 * # Safety
 * `net` a live handle, `out` writable.
 */
int32_t bc_network_to_json(const struct BcNetwork *net, char **out);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from this library not yet freed.
 */
void bc_string_free(char *s);

/**
 * Seeded Monte Carlo run over `n_targets` node ids.
 *
 * # Safety
 * `net` a live handle; `targets` an array of `n_targets` NUL-terminated
 * strings; `out` writable.
 */
int32_t bc_simulate(const struct BcNetwork *net,
                    const char *const *targets,
                    size_t n_targets,
                    size_t n,
                    uint64_t seed,
                    struct BcRun **out);

/**
 * Release a run. NULL is ignored.
 *
 * # Safety
 * `run` must be NULL or a handle from this library not yet freed.
 */
void bc_run_free(struct BcRun *run);

/**
 * # Safety
 * `run` a live handle, `target` a NUL-terminated string, `out` writable.
 */
int32_t bc_run_mean(const struct BcRun *run, const char *target, double *out);

/**
 * Population standard deviation of a target.
 *
 * # Safety
 * As for [`bc_run_mean`].
 */
int32_t bc_run_stddev(const struct BcRun *run, const char *target, double *out);

/**
 * Copy up to `cap` samples of `target` into `buf` and store the total sample
 * count in `len`. Pass `buf = NULL` to query the count only.
 *
 * # Safety
 * `buf` NULL or writable for `cap` doubles; `len` writable.
 */
int32_t bc_run_samples(const struct BcRun *run,
                       const char *target,
                       double *buf,
                       size_t cap,
                       size_t *len);

/**
 * JSON summary (`[{target, n, seed, mean, stddev, histogram}]`). Free with
 * [`bc_string_free`].
 *
 * # Safety
 * `run` a live handle, `out` writable.
 */
int32_t bc_run_summary_json(const struct BcRun *run, char **out);

/**
 * Sample CSV (`index,target,value`). Free with [`bc_string_free`].
 *
 * # Safety
 * `run` a live handle, `out` writable.
 */
int32_t bc_run_samples_csv(const struct BcRun *run, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELIEFCAST_H */
