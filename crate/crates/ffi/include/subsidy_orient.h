#ifndef SUBSIDY_ORIENT_H
#define SUBSIDY_ORIENT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SoStatus {
  SO_STATUS_OK = 0,
  SO_STATUS_INTERNAL = 1,
  SO_STATUS_INVALID_INPUT = 2,
  SO_STATUS_PRECONDITION = 3,
  SO_STATUS_NULL_POINTER = 4,
  SO_STATUS_PANIC = 5,
} SoStatus;

/**
 * Opaque instance handle.
 */
typedef struct SoInstance SoInstance;

/**
 * Opaque solution handle.
 */
typedef struct SoSolution SoSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SoStatus so_instance_from_json(const char *json, struct SoInstance **out);

/**
 * # Safety
 * `inst` must come from [`so_instance_from_json`] or be null.
 */
void so_instance_free(struct SoInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum SoStatus so_instance_agent_count(const struct SoInstance *inst, size_t *out);

/**
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum SoStatus so_instance_edge_count(const struct SoInstance *inst, size_t *out);

/**
 * Runs a solver. `algo` may be null for automatic selection.
 *
 * # Safety
 * `inst` must be a live handle, `algo` null or NUL-terminated, `out` writable.
 */
enum SoStatus so_solve(const struct SoInstance *inst, const char *algo, struct SoSolution **out);

/**
 * # Safety
 * `sol` must come from [`so_solve`] or be null.
 */
void so_solution_free(struct SoSolution *sol);

/**
 * Owner of `edge` in the solution.
 *
 * # Safety
 * `sol` must be a live handle and `out` writable.
 */
enum SoStatus so_solution_owner(const struct SoSolution *sol, size_t edge, size_t *out);

/**
 * Payment of `agent` as a rational string.
 *
 * # Safety
 * `sol` must be a live handle and `out` writable.
 */
enum SoStatus so_solution_payment(const struct SoSolution *sol, size_t agent, char **out);

/**
 * Total subsidy as a rational string.
 *
 * # Safety
 * `sol` must be a live handle and `out` writable.
 */
enum SoStatus so_solution_total_subsidy(const struct SoSolution *sol, char **out);

/**
 * # Safety
 * `sol` must be a live handle and `out` writable.
 */
enum SoStatus so_solution_to_json(const struct SoSolution *sol, char **out);

/**
 * Verifies a solution document against an instance. `report` may be null.
 *
 * # Safety
 * `inst` must be a live handle, `solution_json` NUL-terminated and
 * `all_pass` writable.
 */
enum SoStatus so_verify(const struct SoInstance *inst,
                        const char *solution_json,
                        bool *all_pass,
                        char **report);

/**
 * Exact minimum subsidy as a rational string.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum SoStatus so_oracle_min_subsidy(const struct SoInstance *inst, size_t max_edges, char **out);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *so_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void so_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBSIDY_ORIENT_H */
