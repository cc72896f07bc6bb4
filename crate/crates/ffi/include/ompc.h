#ifndef OMPC_H
#define OMPC_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>

/**
 * Result code of every fallible call.
 */
typedef enum OmpcStatus {
  OMPC_STATUS_OK = 0,
  OMPC_STATUS_NULL_ARGUMENT = 1,
  OMPC_STATUS_INVALID_UTF8 = 2,
  OMPC_STATUS_PARSE = 3,
  OMPC_STATUS_INVALID_INSTANCE = 4,
  /**
   * No feasible answer exists for the arriving constraint or demand.
   */
  OMPC_STATUS_INFEASIBLE = 5,
  /**
   * The instance stream has no further constraints or demands.
   */
  OMPC_STATUS_EXHAUSTED = 6,
  OMPC_STATUS_INTERNAL = 7,
} OmpcStatus;

/**
 * Online packing/covering solver with its instance.
 */
typedef struct OmpcSolver OmpcSolver;

/**
 * Online Steiner forest engine at a fixed weight guess.
 */
typedef struct OmpcSteiner OmpcSteiner;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ompc_last_error(void);

/**
 * Builds a solver from an instance JSON document (variables, covering
 * stream, optional certificate). Constraints are fed with
 * [`ompc_solver_arrive_next`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum OmpcStatus ompc_solver_new(const char *json,
                                double rho,
                                double gamma,
                                struct OmpcSolver **out);

/**
 * Answers the next covering constraint of the instance stream and writes
 * the size of the chosen set. Returns `Exhausted` at the end of the stream.
 *
 * # Safety
 * `solver` must come from [`ompc_solver_new`]; `set_size` may be null.
 */
enum OmpcStatus ompc_solver_arrive_next(struct OmpcSolver *solver, size_t *set_size);

/**
 * Number of constraints answered so far.
 *
 * # Safety
 * `solver` must come from [`ompc_solver_new`].
 */
enum OmpcStatus ompc_solver_steps(const struct OmpcSolver *solver, size_t *out);

/**
 * Largest accumulated scaled load over all packing rows.
 *
 * # Safety
 * `solver` must come from [`ompc_solver_new`].
 */
enum OmpcStatus ompc_solver_max_load(const struct OmpcSolver *solver, double *out);

/**
 * Largest packing row value of the committed assignment.
 *
 * # Safety
 * `solver` must come from [`ompc_solver_new`].
 */
enum OmpcStatus ompc_solver_max_violation(const struct OmpcSolver *solver, double *out);

/**
 * Releases a solver. Null is ignored.
 *
 * # Safety
 * `solver` must come from [`ompc_solver_new`] and not be used afterwards.
 */
void ompc_solver_free(struct OmpcSolver *solver);

/**
 * Builds a Steiner engine from an instance JSON document (vertices, edges,
 * degree bounds, demands) at the given weight guess. `exact_oracle`
 * selects exact path enumeration instead of the label-setting search.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum OmpcStatus ompc_steiner_new(const char *json,
                                 double w_guess,
                                 double rho,
                                 double gamma,
                                 bool exact_oracle,
                                 struct OmpcSteiner **out);

/**
 * Serves the next demand of the instance and writes the number of edges
 * bought for it. Returns `Exhausted` after the last demand.
 *
 * # Safety
 * `steiner` must come from [`ompc_steiner_new`]; `edges` may be null.
 */
enum OmpcStatus ompc_steiner_serve_next(struct OmpcSteiner *steiner, size_t *edges);

/**
 * Total weight bought so far (edges counted once per demand using them).
 *
 * # Safety
 * `steiner` must come from [`ompc_steiner_new`].
 */
enum OmpcStatus ompc_steiner_weight(const struct OmpcSteiner *steiner, double *out);

/**
 * Largest packing load: degree rows over their bounds and the weight row
 * over the guess.
 *
 * # Safety
 * `steiner` must come from [`ompc_steiner_new`].
 */
enum OmpcStatus ompc_steiner_max_packing_load(const struct OmpcSteiner *steiner, double *out);

/**
 * Whether every demand served so far is connected by bought edges.
 *
 * # Safety
 * `steiner` must come from [`ompc_steiner_new`].
 */
enum OmpcStatus ompc_steiner_connected(const struct OmpcSteiner *steiner, bool *out);

/**
 * Releases an engine. Null is ignored.
 *
 * # Safety
 * `steiner` must come from [`ompc_steiner_new`] and not be used afterwards.
 */
void ompc_steiner_free(struct OmpcSteiner *steiner);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMPC_H */
